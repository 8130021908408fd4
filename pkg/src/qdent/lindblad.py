"""Pure-dephasing master equation on the three-level space.

    d rho/dt = -i [H, rho] - gamma [Jz, [Jz, rho]]

Density matrices are vectorized by column stacking, ``vec(rho) =
rho.reshape(-1, order="F")``, so that ``vec(A rho B) = kron(B.T, A) vec(rho)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import DivergenceError, InvalidParameterError, NumericalError
from .model import ModelParams, build_xi
from .solver import integrate_linear

EXPM_NORM_LIMIT = 1e6


def jz_matrix() -> np.ndarray:
    """Collective pseudo-spin z component on the symmetric subspace."""
    return np.diag([-1.0, 0.0, 1.0]).astype(np.complex128)


def vec(rho) -> np.ndarray:
    return np.asarray(rho, dtype=np.complex128).reshape(-1, order="F")


def unvec(x, dim: int = 3) -> np.ndarray:
    x = np.asarray(x)
    return np.swapaxes(x.reshape(x.shape[:-1] + (dim, dim)), -1, -2)


def dephasing_liouvillian(h, gamma: float, jz=None) -> np.ndarray:
    """Superoperator for ``-i[h, .] - gamma [jz, [jz, .]]`` (column stacking)."""
    h = np.asarray(h, dtype=np.complex128)
    jz = jz_matrix() if jz is None else np.asarray(jz, dtype=np.complex128)
    n = h.shape[0]
    eye = np.eye(n)
    jz2 = jz @ jz
    coherent = -1j * (np.kron(eye, h) - np.kron(h.T, eye))
    dephase = -gamma * (np.kron(eye, jz2) + np.kron(jz2.T, eye) - 2.0 * np.kron(jz.T, jz))
    out = coherent + dephase
    out.setflags(write=False)
    return out


def build_liouvillian(params: ModelParams) -> np.ndarray:
    """9x9 generator of the dephasing master equation for ``params``."""
    return dephasing_liouvillian(build_xi(params), params.gamma)


def expm(a) -> np.ndarray:
    """Matrix exponential by scaling and squaring around a Taylor series.

    The argument is scaled by ``2**-s`` until its 1-norm is at most 1/2; the
    series is summed until a term no longer changes the sum in double
    precision.
    """
    a = np.asarray(a, dtype=np.complex128)
    n = a.shape[0]
    norm = float(np.max(np.sum(np.abs(a), axis=0))) if a.size else 0.0
    s = max(0, int(math.ceil(math.log2(norm / 0.5)))) if norm > 0.5 else 0
    b = a / (2.0 ** s)
    result = np.eye(n, dtype=np.complex128)
    term = np.eye(n, dtype=np.complex128)
    for k in range(1, 40):
        term = term @ b / k
        result = result + term
        if np.max(np.abs(term)) <= 1e-17 * np.max(np.abs(result)):
            break
    for _ in range(s):
        result = result @ result
    return result


def _is_dissipative(lv) -> bool:
    # anti-Hermitian generators give a unitary group; anything else only a semigroup
    return bool(np.max(np.abs(lv + lv.conj().T)) > 1e-14 * max(1.0, np.max(np.abs(lv))))


def _hermitize(rho):
    return 0.5 * (rho + np.swapaxes(rho.conj(), -1, -2))


def propagate_expm(lv, rho0, t: float) -> np.ndarray:
    """``rho(t) = unvec(expm(t L) vec(rho0))``, re-Hermitized.

    Negative ``t`` is only accepted for non-dissipative generators.
    """
    lv = np.asarray(lv, dtype=np.complex128)
    rho0 = np.asarray(rho0, dtype=np.complex128)
    t = float(t)
    if t < 0.0 and _is_dissipative(lv):
        raise InvalidParameterError("backward propagation is undefined for gamma > 0")
    size = abs(t) * float(np.max(np.sum(np.abs(lv), axis=0)))
    if size > EXPM_NORM_LIMIT:
        raise NumericalError(
            f"t*||L|| = {size:.3g} exceeds {EXPM_NORM_LIMIT:g}; subdivide the interval")
    dim = rho0.shape[0]
    return _hermitize(unvec(expm(t * lv) @ vec(rho0), dim))


def propagate_grid(lv, rho0, times) -> np.ndarray:
    """``propagate_expm`` on a uniformly spaced grid starting at 0.

    One step propagator is built and applied repeatedly, so the cost is one
    exponential plus ``len(times)`` matrix-vector products.
    """
    times = np.asarray(times, dtype=np.float64)
    rho0 = np.asarray(rho0, dtype=np.complex128)
    dim = rho0.shape[0]
    out = np.empty((times.size, dim, dim), dtype=np.complex128)
    if times.size == 0:
        return out
    if times[0] != 0.0:
        raise ValueError("propagate_grid expects times starting at 0")
    x = vec(rho0)
    out[0] = rho0
    if times.size > 1:
        dt = times[1] - times[0]
        if not np.allclose(np.diff(times), dt, rtol=1e-9, atol=1e-12):
            raise ValueError("propagate_grid expects a uniform grid")
        step = expm(dt * np.asarray(lv, dtype=np.complex128))
        for k in range(1, times.size):
            x = step @ x
            out[k] = unvec(x, dim)
    return _hermitize(out)


def integrate_rk(lv, rho0, t_grid, tol: float = 1e-12) -> np.ndarray:
    """Adaptive step-doubling RK4 solution of ``d vec(rho)/dt = L vec(rho)``.

    Independent of ``propagate_expm``; returns an array ``(len(t_grid), n, n)``.
    """
    rho0 = np.asarray(rho0, dtype=np.complex128)
    xs = integrate_linear(lv, vec(rho0), t_grid, tol)
    return unvec(xs, rho0.shape[0])


@dataclass(frozen=True)
class PhononSpec:
    """Acoustic-phonon bath entering the dephasing-rate integral.

    ``temperature`` is ``k_B T`` in the same frequency units as ``omega_c``.
    """

    n: int
    omega_c: float
    temperature: float = 0.0
    prefactor: float = 1.0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 0:
            raise InvalidParameterError(f"n must be a non-negative integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        for name in ("omega_c", "temperature", "prefactor"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidParameterError(f"{name} must be finite")
        if self.omega_c <= 0.0:
            raise InvalidParameterError(f"omega_c must be > 0, got {self.omega_c!r}")
        if self.temperature < 0.0:
            raise InvalidParameterError(f"temperature must be >= 0, got {self.temperature!r}")
        if self.prefactor < 0.0:
            raise InvalidParameterError(f"prefactor must be >= 0, got {self.prefactor!r}")


def _integrand(w, spec: PhononSpec):
    if w == 0.0:
        thermal = 2.0 * spec.temperature if (spec.n == 1 and spec.temperature > 0) else 0.0
        return (1.0 if spec.n == 0 else 0.0) + thermal
    base = w ** spec.n * math.exp(-w / spec.omega_c)
    if spec.temperature == 0.0:
        return base
    y = w / spec.temperature
    occupation = 0.0 if y > 700.0 else 1.0 / math.expm1(y)
    return base * (1.0 + 2.0 * occupation)


def phonon_rate(spec: PhononSpec, rtol: float = 1e-10) -> float:
    """Dephasing rate ``prefactor * int_0^inf w^n exp(-w/wc) (1 + 2 N(w, T)) dw``.

    The half-line is split at ``T`` and ``omega_c`` and each piece integrated
    adaptively. For ``n = 0`` and ``T > 0`` the integrand behaves like
    ``2T/w`` at the origin and ``DivergenceError`` is raised.
    """
    if spec.n == 0 and spec.temperature > 0.0:
        raise DivergenceError("integral diverges at w -> 0 for n = 0 and T > 0")
    if spec.prefactor == 0.0:
        return 0.0
    cuts = sorted({c for c in (spec.temperature, spec.omega_c) if c > 0.0})
    edges = [0.0] + cuts
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        val, _ = integrate.quad(_integrand, lo, hi, args=(spec,), epsabs=0.0,
                                epsrel=rtol, limit=200)
        total += val
    val, _ = integrate.quad(_integrand, edges[-1], np.inf, args=(spec,), epsabs=0.0,
                            epsrel=rtol, limit=200)
    total += val
    return spec.prefactor * total
