"""Physical parameters, the three-level basis and the amplitude-equation matrix.

The reduced basis is ``|0> = |0,0>`` (vacuum), ``|1> = (|1,0> + |0,1>)/sqrt(2)``
(symmetric single exciton) and ``|2> = |1,1>`` (biexciton). The antisymmetric
single-exciton state never couples to these and is not represented here.

All rates share one angular-frequency unit and hbar = 1.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .errors import InvalidParameterError, InvalidStateError

DIM = 3
LABELS = ("vacuum", "single", "biexciton")


@dataclass(frozen=True)
class ModelParams:
    """Inputs of the driven, Forster-coupled two-dot model.

    Parameters
    ----------
    omega : float
        Laser-dot coupling. Sets the unit of every other rate.
    delta : float
        Detuning of the laser from the exciton transition.
    eta : float
        Forster hopping rate.
    phi : float
        Laser phase in radians.
    gamma : float
        Pure-dephasing rate, non-negative.
    """

    omega: float = 1.0
    delta: float = 0.0
    eta: float = 0.0
    phi: float = 0.0
    gamma: float = 0.0

    def __post_init__(self):
        for name in ("omega", "delta", "eta", "phi", "gamma"):
            value = getattr(self, name)
            try:
                value = float(value)
            except (TypeError, ValueError):
                raise InvalidParameterError(f"{name} must be a real number, got {value!r}")
            if not math.isfinite(value):
                raise InvalidParameterError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, value)
        if self.omega <= 0.0:
            raise InvalidParameterError(f"omega must be > 0, got {self.omega!r}")
        if self.gamma < 0.0:
            raise InvalidParameterError(f"gamma must be >= 0, got {self.gamma!r}")

    @classmethod
    def from_ratios(cls, delta_ratio=0.0, eta_ratio=0.0, gamma_ratio=0.0, phi=0.0):
        """Build parameters in units of the laser coupling (omega = 1)."""
        return cls(omega=1.0, delta=delta_ratio, eta=eta_ratio, phi=phi, gamma=gamma_ratio)

    @property
    def omega_prime(self) -> float:
        return self.omega / math.sqrt(2.0)

    def normalized(self) -> "ModelParams":
        """Same physics with every rate divided by omega."""
        w = self.omega
        return ModelParams(1.0, self.delta / w, self.eta / w, self.phi, self.gamma / w)

    def with_(self, **changes) -> "ModelParams":
        return replace(self, **changes)


def build_xi(params: ModelParams) -> np.ndarray:
    """Hermitian coefficient matrix of ``i dB/dt = xi B``.

    Off-diagonal bonds (0,1) and (1,2) carry ``omega/sqrt(2) * exp(-i phi)``;
    the diagonal is ``(0, delta - eta, 2 delta)``.
    """
    if not isinstance(params, ModelParams):
        raise InvalidParameterError("build_xi expects a ModelParams instance")
    w = params.omega_prime * complex(math.cos(params.phi), -math.sin(params.phi))
    xi = np.zeros((3, 3), dtype=np.complex128)
    xi[0, 1] = xi[1, 2] = w
    xi[1, 0] = xi[2, 1] = w.conjugate()
    xi[1, 1] = params.delta - params.eta
    xi[2, 2] = 2.0 * params.delta
    return xi


def basis_state(index: int) -> np.ndarray:
    b = np.zeros(DIM, dtype=np.complex128)
    b[index] = 1.0
    return b


def as_state_vector(b, *, atol: float = 1e-10) -> np.ndarray:
    """Validate a 3-component amplitude vector and return it as complex array."""
    b = np.asarray(b, dtype=np.complex128)
    if b.shape != (DIM,):
        raise InvalidStateError(f"state vector must have shape (3,), got {b.shape}")
    if not np.all(np.isfinite(b)):
        raise InvalidStateError("state vector has non-finite entries")
    norm2 = float(np.vdot(b, b).real)
    if abs(norm2 - 1.0) > atol:
        raise InvalidStateError(f"state vector norm^2 is {norm2:.3g}, expected 1")
    return b


def pure_density(b) -> np.ndarray:
    b = np.asarray(b, dtype=np.complex128)
    return np.outer(b, b.conj())


@dataclass(frozen=True)
class DensityReport:
    """Diagnostic summary of a candidate density matrix."""

    hermiticity_defect: float
    trace_defect: float
    min_eigenvalue: float

    def ok(self, tol: float = 1e-10, psd_tol: float | None = None) -> bool:
        psd_tol = tol if psd_tol is None else psd_tol
        return (self.hermiticity_defect <= tol and self.trace_defect <= tol
                and self.min_eigenvalue >= -psd_tol)

    def __str__(self):
        return (f"hermiticity_defect={self.hermiticity_defect:.3e} "
                f"trace_defect={self.trace_defect:.3e} "
                f"min_eigenvalue={self.min_eigenvalue:.6g}")


def validate_density(rho) -> DensityReport:
    """Report Hermiticity defect, trace defect and smallest eigenvalue.

    Works for any square matrix. The eigenvalue is taken from the Hermitian
    part so that it is always real.
    """
    rho = np.asarray(rho, dtype=np.complex128)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise InvalidStateError(f"density matrix must be square, got shape {rho.shape}")
    herm = float(np.max(np.abs(rho - rho.conj().T))) if rho.size else 0.0
    trace = abs(complex(np.trace(rho)) - 1.0)
    sym = 0.5 * (rho + rho.conj().T)
    lam = float(np.linalg.eigvalsh(sym)[0])
    return DensityReport(herm, trace, lam)


def read_density_json(path) -> np.ndarray:
    """Read ``{"dim": n, "rho": [[re, im], ...]}`` (row-major).

    ``rho`` may be a flat list of ``dim*dim`` pairs or a nested list of rows.
    Raises ``InvalidStateError`` for malformed content.
    """
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidStateError(f"{path}: not valid JSON ({exc})")
    return density_from_json(doc)


def density_from_json(doc) -> np.ndarray:
    if not isinstance(doc, dict) or "rho" not in doc or "dim" not in doc:
        raise InvalidStateError('density JSON needs keys "dim" and "rho"')
    dim = doc["dim"]
    if not isinstance(dim, int) or dim < 1:
        raise InvalidStateError(f"dim must be a positive integer, got {dim!r}")
    try:
        arr = np.asarray(doc["rho"], dtype=np.float64)
    except (TypeError, ValueError):
        raise InvalidStateError("rho entries must be [re, im] number pairs")
    if arr.shape == (dim * dim, 2):
        arr = arr.reshape(dim, dim, 2)
    if arr.shape != (dim, dim, 2):
        raise InvalidStateError(
            f"rho must hold {dim}x{dim} [re, im] pairs, got array of shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidStateError("rho has non-finite entries")
    return arr[..., 0] + 1j * arr[..., 1]


def density_to_json(rho) -> dict:
    rho = np.asarray(rho, dtype=np.complex128)
    pairs = [[float(z.real), float(z.imag)] for z in rho.ravel()]
    return {"dim": int(rho.shape[0]), "rho": pairs}


def write_density_json(path, rho) -> None:
    Path(path).write_text(json.dumps(density_to_json(rho)) + "\n", encoding="utf-8")


def read_state_json(path):
    """Read an initial state file.

    Either a density matrix (see ``read_density_json``) or a pure state
    ``{"state": [[re, im], [re, im], [re, im]]}``. Returns an amplitude vector
    or a 3x3 density matrix.
    """
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidStateError(f"{path}: not valid JSON ({exc})")
    if isinstance(doc, dict) and "state" in doc:
        try:
            arr = np.asarray(doc["state"], dtype=np.float64)
        except (TypeError, ValueError):
            raise InvalidStateError("state entries must be [re, im] number pairs")
        if arr.shape != (DIM, 2):
            raise InvalidStateError(f"state must hold 3 [re, im] pairs, got shape {arr.shape}")
        return as_state_vector(arr[:, 0] + 1j * arr[:, 1])
    rho = density_from_json(doc)
    if rho.shape != (DIM, DIM):
        raise InvalidStateError(f"initial density matrix must be 3x3, got {rho.shape}")
    return rho
