"""Exact solution of the three-level amplitude equations ``i dB/dt = xi B``.

The eigenvalues come from the trigonometric solution of the real
characteristic cubic of ``xi``; eigenvectors from the null space of
``xi - z I``. Near-degenerate spectra are handed to a cyclic Jacobi
diagonalization instead.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import NumericalError, StepUnderflowError

# c2**2 - 3*c1 below this means a triple root
TRIPLE_ROOT_TOL = 1e-24
# eigenvalues closer than this (relative to ||xi||) go to Jacobi
DEGENERACY_TOL = 1e-9
RESIDUAL_TOL = 1e-10
ORTHO_TOL = 1e-12


def characteristic_coeffs(xi) -> tuple[float, float, float]:
    """Coefficients ``(c2, c1, c0)`` of ``z**3 + c2 z**2 + c1 z + c0 = det(zI - xi)``.

    Valid for Hermitian tridiagonal ``xi`` (``xi[0, 2] == 0``), which covers
    the model matrix.
    """
    xi = np.asarray(xi)
    a0, a1, a2 = (float(xi[k, k].real) for k in range(3))
    w01 = abs(xi[0, 1]) ** 2
    w12 = abs(xi[1, 2]) ** 2
    c2 = -(a0 + a1 + a2)
    c1 = a0 * a1 + a0 * a2 + a1 * a2 - w01 - w12
    c0 = -a0 * a1 * a2 + a0 * w12 + a2 * w01
    return c2, c1, c0


def _poly(z, c2, c1, c0):
    return ((z + c2) * z + c1) * z + c0


def cubic_eigenvalues(c2, c1, c0) -> tuple[np.ndarray, bool]:
    """Three real roots of ``z**3 + c2 z**2 + c1 z + c0``, ascending.

    Uses the trigonometric form with phase offsets ``2 pi k / 3`` followed by
    at most two guarded Newton corrections. Returns ``(roots, degenerate)``;
    ``degenerate`` is set when ``c2**2 - 3 c1 < 1e-24`` (triple root), in
    which case all three roots equal ``-c2/3``.
    """
    spread = c2 * c2 - 3.0 * c1
    if spread < TRIPLE_ROOT_TOL:
        z = -c2 / 3.0
        return np.array([z, z, z]), True
    r = math.sqrt(spread)
    arg = (9.0 * c2 * c1 - 2.0 * c2 ** 3 - 27.0 * c0) / (2.0 * spread * r)
    theta = math.acos(min(1.0, max(-1.0, arg)))
    roots = []
    for k in range(3):
        z = (-c2 + 2.0 * r * math.cos((theta - 2.0 * math.pi * k) / 3.0)) / 3.0
        for _ in range(2):
            f = _poly(z, c2, c1, c0)
            df = (3.0 * z + 2.0 * c2) * z + c1
            if f == 0.0 or df == 0.0:
                break
            z_new = z - f / df
            if abs(_poly(z_new, c2, c1, c0)) < abs(f):
                z = z_new
            else:
                break
        roots.append(z)
    return np.sort(np.array(roots), kind="stable"), False


def jacobi_eigh(h, tol: float = 1e-15, max_sweeps: int = 50):
    """Eigen-decomposition of a small Hermitian matrix by cyclic Jacobi.

    Returns ``(w, v)`` with ascending eigenvalues and orthonormal columns.
    """
    w, v, sweeps = _kernels.jacobi_eigh(np.asarray(h, dtype=np.complex128), tol, max_sweeps)
    if sweeps < 0:
        raise NumericalError(f"Jacobi diagonalization did not converge in {max_sweeps} sweeps")
    return w, v


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues ``z`` (ascending) and orthonormal eigenvectors ``v`` (columns).

    ``method`` records which route produced them: ``"closed-form"`` or
    ``"jacobi"``.
    """

    z: np.ndarray
    v: np.ndarray
    method: str = "closed-form"

    def __post_init__(self):
        self.z.setflags(write=False)
        self.v.setflags(write=False)

    def coefficients(self, b_init) -> np.ndarray:
        """Expansion coefficients ``lam[j, l] = v[j, l] * <v_l, b_init>``.

        With them ``B_j(t) = sum_l lam[j, l] exp(-i z_l t)``.
        """
        proj = self.v.conj().T @ np.asarray(b_init, dtype=np.complex128)
        return self.v * proj[None, :]

    def propagator(self, t) -> np.ndarray:
        """``U(t) = V exp(-i z t) V^dagger``; ``t`` may be an array."""
        t = np.asarray(t, dtype=np.float64)
        phases = np.exp(-1j * t[..., None] * self.z)
        return (self.v * phases[..., None, :]) @ self.v.conj().T

    def reconstruct(self) -> np.ndarray:
        return (self.v * self.z) @ self.v.conj().T


def _null_vector(m: np.ndarray) -> np.ndarray:
    """Unit vector spanning the null space of a rank-2 3x3 matrix."""
    best = None
    best_norm = -1.0
    for i, j in ((0, 1), (0, 2), (1, 2)):
        c = np.cross(m[i], m[j])
        n = float(np.linalg.norm(c))
        if n > best_norm:
            best, best_norm = c, n
    if best_norm == 0.0:
        raise NumericalError("null-space extraction failed: matrix rank < 2")
    v = best / best_norm
    k = int(np.argmax(np.abs(v)))
    return v * (abs(v[k]) / v[k])


def _check(xi, z, v, scale) -> bool:
    res = np.linalg.norm(xi @ v - v * z, axis=0)
    if np.any(res > RESIDUAL_TOL * scale):
        return False
    gram = v.conj().T @ v
    return bool(np.max(np.abs(gram - np.eye(3))) <= ORTHO_TOL)


def spectral_decompose(xi) -> SpectralDecomposition:
    """Eigen-decomposition of the model matrix via the characteristic cubic.

    Falls back to Jacobi when the cubic reports a triple root, when two
    eigenvalues are closer than ``1e-9 * ||xi||``, or when the closed-form
    vectors miss the residual/orthonormality targets.
    """
    xi = np.asarray(xi, dtype=np.complex128)
    scale = max(float(np.linalg.norm(xi)), 1e-300)
    z, degenerate = cubic_eigenvalues(*characteristic_coeffs(xi))
    if not degenerate and np.min(np.diff(z)) > DEGENERACY_TOL * scale:
        v = np.column_stack([_null_vector(xi - zj * np.eye(3)) for zj in z])
        if _check(xi, z, v, scale):
            return SpectralDecomposition(z, v, "closed-form")
    z, v = jacobi_eigh(xi)
    if not _check(xi, z, v, scale):
        raise NumericalError("spectral decomposition misses the residual target")
    return SpectralDecomposition(z, v, "jacobi")


def evolve_pure(decomp: SpectralDecomposition, b_init, t) -> np.ndarray:
    """Amplitudes ``B(t) = sum_j exp(-i z_j t) v_j <v_j, B(0)>``.

    ``t`` is in units of the inverse rate scale (Omega t for normalized
    parameters); a 1-D array of times gives an array of shape ``(len(t), 3)``.
    """
    b = np.asarray(b_init, dtype=np.complex128)
    t = np.asarray(t, dtype=np.float64)
    proj = decomp.v.conj().T @ b
    phases = np.exp(-1j * t[..., None] * decomp.z)
    return (phases * proj) @ decomp.v.T


def occupations(b) -> np.ndarray:
    """Level populations ``|b_i|**2`` along the last axis."""
    b = np.asarray(b)
    return b.real ** 2 + b.imag ** 2


def integrate_linear(a, y0, t_grid, tol: float = 1e-12, h_min: float = 1e-12,
                     max_steps: int = 50_000_000) -> np.ndarray:
    """Solve ``dy/dt = a y`` from ``t = 0`` by step-doubling RK4.

    Output rows correspond to ``t_grid`` (ascending, non-negative).
    """
    t_grid = np.asarray(t_grid, dtype=np.float64)
    if t_grid.ndim != 1 or np.any(np.diff(t_grid) < 0) or (t_grid.size and t_grid[0] < 0):
        raise ValueError("t_grid must be a 1-D ascending array starting at t >= 0")
    ys, _, status = _kernels.rk4_doubling(np.asarray(a, dtype=np.complex128),
                                          np.asarray(y0, dtype=np.complex128),
                                          t_grid, tol, h_min, max_steps)
    if status == _kernels.STATUS_UNDERFLOW:
        raise StepUnderflowError(f"required step fell below {h_min:g}")
    if status == _kernels.STATUS_MAXSTEPS:
        raise NumericalError(f"integration exceeded {max_steps} steps")
    return ys


def integrate_amplitudes(xi, b_init, t_grid, tol: float = 1e-12) -> np.ndarray:
    """Direct numerical solution of ``i dB/dt = xi B``, independent of the cubic."""
    return integrate_linear(-1j * np.asarray(xi, dtype=np.complex128), b_init, t_grid, tol)
