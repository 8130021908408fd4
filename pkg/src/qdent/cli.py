"""Command-line interface: ``qdent {evolve,sweep,entangle,phonon-rate,presets}``.

Exit codes: 0 success, 2 usage or parameter error, 3 numerical failure,
4 input data failing validation.
"""
from __future__ import annotations

import argparse
import json
import sys
from contextlib import contextmanager

import numpy as np

from . import __version__
from .entanglement import concurrence, embed_two_qubit, negativity
from .errors import (DivergenceError, InvalidParameterError, InvalidStateError,
                     QdentError)
from .io import JSON_DIGITS, RunManifest, parse_config, write_csv
from .lindblad import PhononSpec, phonon_rate
from .model import (ModelParams, basis_state, read_density_json, read_state_json,
                    validate_density)
from .sweep import (OBSERVABLES, PARAM_FIELDS, PRESETS, SweepConfig, figure_preset,
                    normalize_preset_id, run_sweep, time_series)

EXIT_USAGE = 2
EXIT_NUMERICAL = 3
EXIT_BAD_DATA = 4

NAMED_STATES = {"vacuum": 0, "single": 1, "biexciton": 2}
VALIDATION_TOL = 1e-6
SWEEP_AXIS_KEYS = ("param", "param_min", "param_max", "points", "t_max", "steps",
                   "delta_ratio", "eta_ratio", "gamma_ratio", "phi")
PHONON_NOTE = ("note: absolute calibration needs a material-specific prefactor; "
               "the 20-60 ueV range of typical dots is not reproduced with prefactor=1")


class UsageError(Exception):
    pass


class BadDataError(Exception):
    pass


def _add_model_flags(p, default):
    p.add_argument("--delta-ratio", type=float, default=default, help="detuning / Omega")
    p.add_argument("--eta-ratio", type=float, default=default, help="Forster rate / Omega")
    p.add_argument("--gamma-ratio", type=float, default=default, help="dephasing rate / Omega")
    p.add_argument("--phi", type=float, default=default, help="laser phase (rad)")


def build_parser():
    parser = argparse.ArgumentParser(prog="qdent", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"qdent {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    subs = {}

    p = sub.add_parser("evolve", help="time series of populations and entanglement")
    _add_model_flags(p, 0.0)
    p.add_argument("--t-max", type=float, default=25.0, help="final Omega t")
    p.add_argument("--steps", type=int, default=501, help="number of time samples")
    p.add_argument("--initial", default="vacuum",
                   help="vacuum, single, biexciton, or a state/density JSON path")
    p.add_argument("--method", choices=("auto", "closed-form", "lindblad"), default="auto")
    p.add_argument("--out", default="-", help="output CSV path (default stdout)")
    p.add_argument("--config", help="key=value file; flags override its values")
    subs["evolve"] = p

    p = sub.add_parser("sweep", help="observables over an (Omega t x parameter) grid")
    p.add_argument("--figure", help="figure preset: 1, 2, 3a, 3b, 4a or 4b")
    _add_model_flags(p, None)
    p.add_argument("--param", choices=sorted(PARAM_FIELDS), default=None)
    p.add_argument("--param-min", type=float, default=None)
    p.add_argument("--param-max", type=float, default=None)
    p.add_argument("--points", type=int, default=None)
    p.add_argument("--t-max", type=float, default=None)
    p.add_argument("--steps", type=int, default=None)
    p.add_argument("--observables", default=None,
                   help="comma-separated subset of " + ",".join(OBSERVABLES))
    p.add_argument("--method", choices=("auto", "closed-form", "lindblad"), default=None)
    p.add_argument("--initial", default=None)
    p.add_argument("--workers", type=int, default=1, help="threads over parameter points")
    p.add_argument("--out", default="-")
    p.add_argument("--config")
    subs["sweep"] = p

    p = sub.add_parser("entangle", help="negativity and concurrence of a density matrix")
    p.add_argument("--rho", required=True, help="density-matrix JSON (dim 3 or 4)")
    subs["entangle"] = p

    p = sub.add_parser("phonon-rate", help="dephasing rate from the phonon integral")
    p.add_argument("--n", type=int, required=True, help="spectral exponent")
    p.add_argument("--cutoff", type=float, default=1.0, help="cutoff frequency")
    p.add_argument("--temperature", type=float, default=0.0, help="k_B T, frequency units")
    p.add_argument("--prefactor", type=float, default=1.0)
    subs["phonon-rate"] = p

    p = sub.add_parser("presets", help="list figure presets")
    subs["presets"] = p
    return parser, subs


def _apply_config(parser, subs, args, argv):
    """Re-parse with values from ``--config`` as defaults."""
    path = getattr(args, "config", None)
    if not path:
        return args
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = parse_config(fh.read())
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}")
    command = cfg.pop("command", args.command)
    if command != args.command:
        raise UsageError(f"config {path} is for '{command}', not '{args.command}'")
    cfg.pop("version", None)
    p = subs[args.command]
    known = {a.dest for a in p._actions} - {"help", "config"}
    unknown = sorted(set(cfg) - known)
    if unknown:
        raise UsageError(f"unknown config keys in {path}: {', '.join(unknown)}")
    p.set_defaults(**cfg)
    return parser.parse_args(argv)


def _load_initial(spec):
    if spec in NAMED_STATES:
        return basis_state(NAMED_STATES[spec])
    try:
        state = read_state_json(spec)
    except OSError as exc:
        raise UsageError(f"cannot read initial state {spec}: {exc}")
    except InvalidStateError as exc:
        raise BadDataError(str(exc))
    if state.ndim == 2:
        report = validate_density(state)
        if not report.ok(VALIDATION_TOL):
            raise BadDataError(f"initial density matrix fails validation: {report}")
        state = 0.5 * (state + state.conj().T)
    return state


@contextmanager
def _output(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            yield fh


def cmd_evolve(args):
    params = ModelParams.from_ratios(args.delta_ratio, args.eta_ratio, args.gamma_ratio, args.phi)
    if not args.t_max > 0:
        raise UsageError(f"--t-max must be > 0, got {args.t_max}")
    if args.steps < 2:
        raise UsageError(f"--steps must be >= 2, got {args.steps}")
    method = args.method
    if method == "auto":
        method = "closed-form" if params.gamma == 0 else "lindblad"
    if method == "closed-form" and params.gamma > 0:
        raise UsageError("closed-form method requires --gamma-ratio 0")
    initial = _load_initial(args.initial)
    times = np.linspace(0.0, args.t_max, args.steps)
    values = time_series(params, initial, times, OBSERVABLES, method)
    manifest = RunManifest("evolve", {
        "delta_ratio": params.delta, "eta_ratio": params.eta,
        "gamma_ratio": params.gamma, "phi": params.phi,
        "t_max": float(args.t_max), "steps": args.steps,
        "initial": args.initial, "method": method,
    }, out=args.out)
    rows = (np.concatenate(([t], v)) for t, v in zip(times, values))
    with _output(args.out) as fh:
        write_csv(fh, manifest, ("omega_t",) + OBSERVABLES, rows)
    return 0


def _resolve_sweep(args):
    if args.figure is not None:
        try:
            preset = figure_preset(args.figure)
        except InvalidParameterError as exc:
            raise UsageError(str(exc))
        given = {
            "param": args.param, "param_min": args.param_min, "param_max": args.param_max,
            "points": args.points, "t_max": args.t_max, "steps": args.steps,
            "delta_ratio": args.delta_ratio, "eta_ratio": args.eta_ratio,
            "gamma_ratio": args.gamma_ratio, "phi": args.phi,
        }
        fixed = {
            "param": preset.param, "param_min": preset.param_min,
            "param_max": preset.param_max, "points": preset.n_points,
            "t_max": preset.t_max, "steps": preset.n_steps,
            "delta_ratio": preset.base.delta, "eta_ratio": preset.base.eta,
            "gamma_ratio": preset.base.gamma, "phi": preset.base.phi,
        }
        clash = [k for k in SWEEP_AXIS_KEYS if given[k] is not None and given[k] != fixed[k]]
        if clash:
            raise UsageError(f"--figure {args.figure} conflicts with explicit "
                             + ", ".join("--" + k.replace("_", "-") for k in clash))
        method = args.method if args.method not in (None, "auto") else preset.method
        observables = preset.observables
        if args.observables:
            observables = tuple(o.strip() for o in args.observables.split(",") if o.strip())
        initial_name = args.initial or "vacuum"
        return SweepConfig(
            base=preset.base, t_max=preset.t_max, n_steps=preset.n_steps,
            param=preset.param, param_min=preset.param_min, param_max=preset.param_max,
            n_points=preset.n_points, initial=_load_initial(initial_name),
            observables=observables, method=method, preset=preset.preset,
        ), initial_name

    def pick(v, d):
        return d if v is None else v

    base = ModelParams.from_ratios(pick(args.delta_ratio, 0.0), pick(args.eta_ratio, 0.0),
                                   pick(args.gamma_ratio, 0.0), pick(args.phi, 0.0))
    param = pick(args.param, "delta_ratio")
    observables = OBSERVABLES
    if args.observables:
        observables = tuple(o.strip() for o in args.observables.split(",") if o.strip())
    method = pick(args.method, "auto")
    if method == "auto":
        gmax = pick(args.param_max, 10.0) if param == "gamma_ratio" else base.gamma
        method = "closed-form" if gmax == 0 else "lindblad"
    initial_name = pick(args.initial, "vacuum")
    return SweepConfig(
        base=base, t_max=pick(args.t_max, 25.0), n_steps=pick(args.steps, 501),
        param=param, param_min=pick(args.param_min, 0.0), param_max=pick(args.param_max, 10.0),
        n_points=pick(args.points, 101), initial=_load_initial(initial_name),
        observables=observables, method=method,
    ), initial_name


def sweep_manifest(config: SweepConfig, initial_name: str, out: str = "-") -> RunManifest:
    params = {}
    if config.preset:
        params["figure"] = config.preset[3:]
    params.update({
        "delta_ratio": config.base.delta, "eta_ratio": config.base.eta,
        "gamma_ratio": config.base.gamma, "phi": config.base.phi,
        "param": config.param, "param_min": float(config.param_min),
        "param_max": float(config.param_max), "points": int(config.n_points),
        "t_max": float(config.t_max), "steps": int(config.n_steps),
        "observables": config.observables, "method": config.method,
        "initial": initial_name,
    })
    return RunManifest("sweep", params, out=out)


def cmd_sweep(args):
    config, initial_name = _resolve_sweep(args)
    result = run_sweep(config, workers=max(1, args.workers))
    manifest = sweep_manifest(config, initial_name, args.out)

    def rows():
        for i, value in enumerate(result.param_values):
            for j, t in enumerate(result.times):
                yield (value, t, *result.data[i, j])

    with _output(args.out) as fh:
        write_csv(fh, manifest, ("param_value", "omega_t") + result.observables, rows())
    return 0


def cmd_entangle(args):
    try:
        rho = read_density_json(args.rho)
    except OSError as exc:
        raise UsageError(f"cannot read {args.rho}: {exc}")
    except InvalidStateError as exc:
        raise UsageError(f"malformed density matrix: {exc}")
    if rho.shape not in ((3, 3), (4, 4)):
        raise UsageError(f"density matrix must be 3x3 or 4x4, got {rho.shape}")
    report = validate_density(rho)
    if not report.ok(VALIDATION_TOL):
        raise BadDataError(f"density matrix fails validation: {report}")
    rho4 = embed_two_qubit(rho) if rho.shape == (3, 3) else rho
    out = {
        "negativity": float(f"{negativity(rho4):.{JSON_DIGITS}g}"),
        "concurrence": float(f"{concurrence(rho4):.{JSON_DIGITS}g}"),
    }
    print(json.dumps(out))
    return 0


def cmd_phonon_rate(args):
    try:
        spec = PhononSpec(args.n, args.cutoff, args.temperature, args.prefactor)
        value = phonon_rate(spec)
    except (InvalidParameterError, DivergenceError) as exc:
        raise UsageError(str(exc))
    print(f"{value:.10g}")
    print(PHONON_NOTE, file=sys.stderr)
    return 0


def cmd_presets(args):
    for key, spec in PRESETS.items():
        base = ", ".join(f"{k}={v:g}" for k, v in spec["base"].items() if k != spec["param"])
        print(f"{key[3:]:<4} sweep {spec['param']} over [0, 10]; {base}; "
              f"observables {','.join(spec['observables'])}")
    return 0


COMMANDS = {
    "evolve": cmd_evolve,
    "sweep": cmd_sweep,
    "entangle": cmd_entangle,
    "phonon-rate": cmd_phonon_rate,
    "presets": cmd_presets,
}


def main(argv=None) -> int:
    parser, subs = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(argv)
    try:
        args = _apply_config(parser, subs, args, argv)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"qdent {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BadDataError as exc:
        print(f"qdent {args.command}: invalid input: {exc}", file=sys.stderr)
        return EXIT_BAD_DATA
    except InvalidParameterError as exc:
        print(f"qdent {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except QdentError as exc:
        print(f"qdent {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
