"""CSV output with self-describing manifest headers, and key=value configs.

A data file starts with ``#``-prefixed ``key=value`` lines recording every
resolved input. The same lines are accepted by ``--config``, so passing a
data file back as its own config reproduces it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from . import __version__
from .errors import NumericalError

CSV_DIGITS = 9
JSON_DIGITS = 12


def format_float(x: float, digits: int = CSV_DIGITS) -> str:
    x = float(x)
    if not math.isfinite(x):
        raise NumericalError(f"refusing to write non-finite value {x!r}")
    return f"{x + 0.0:.{digits}g}"


def format_value(value) -> str:
    """Manifest encoding; floats use the shortest round-trip repr."""
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return ",".join(str(v) for v in value)
    return str(value)


@dataclass
class RunManifest:
    command: str
    params: dict = field(default_factory=dict)
    version: str = __version__
    out: str = "-"

    def lines(self) -> list[str]:
        rows = [f"# qdent {self.version}",
                f"# command={self.command}",
                f"# version={self.version}"]
        rows += [f"# {k}={format_value(v)}" for k, v in self.params.items()]
        rows.append(f"# out={self.out}")
        return rows


def parse_config(text: str) -> dict:
    """Parse ``key=value`` lines; a leading ``#`` is stripped, other lines ignored."""
    out = {}
    for raw in text.splitlines():
        line = raw.strip()
        if line.startswith("#"):
            line = line[1:].strip()
        if not line or "=" not in line:
            continue
        key, _, value = line.partition("=")
        out[key.strip()] = value.strip()
    return out


def write_csv(fh, manifest: RunManifest, columns, rows) -> None:
    """Write manifest header, column line and ``rows`` (iterables of floats)."""
    buf = [*manifest.lines(), ",".join(columns)]
    for row in rows:
        buf.append(",".join(format_float(v) for v in row))
    fh.write("\n".join(buf) + "\n")


def read_csv(path):
    """Read a qdent CSV. Returns ``(config_dict, columns, rows)``."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    header = [ln for ln in text.splitlines() if ln.startswith("#")]
    body = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    columns = body[0].split(",") if body else []
    rows = [[float(x) for x in ln.split(",")] for ln in body[1:]]
    return parse_config("\n".join(header)), columns, rows
