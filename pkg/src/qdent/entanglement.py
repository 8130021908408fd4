"""Two-qubit embedding, partial transpose, negativity and concurrence.

Two-qubit matrices use the product basis ``|00>, |01>, |10>, |11>``. All
functions accept stacks of matrices (leading batch axes).
"""
from __future__ import annotations

import numpy as np

from .errors import InvalidStateError
from .model import validate_density

# |0> -> |00>, |1> -> (|01> + |10>)/sqrt(2), |2> -> |11>
EMBEDDING = np.zeros((4, 3), dtype=np.complex128)
EMBEDDING[0, 0] = 1.0
EMBEDDING[1, 1] = EMBEDDING[2, 1] = 1.0 / np.sqrt(2.0)
EMBEDDING[3, 2] = 1.0
EMBEDDING.setflags(write=False)

ANTISYMMETRIC = np.array([0.0, 1.0, -1.0, 0.0], dtype=np.complex128) / np.sqrt(2.0)
ANTISYMMETRIC.setflags(write=False)

SIGMA_YY = np.array([[0, 0, 0, -1],
                     [0, 0, 1, 0],
                     [0, 1, 0, 0],
                     [-1, 0, 0, 0]], dtype=np.complex128)
SIGMA_YY.setflags(write=False)

NEG_EIG_TOL = 1e-12
# eigenvalues of rho * rho_tilde below this are treated as zero
CONCURRENCE_FLOOR = 1e-14


def embed_state(b) -> np.ndarray:
    """Amplitudes (B0, B1, B2) -> two-qubit state vector."""
    return np.asarray(b, dtype=np.complex128) @ EMBEDDING.T


def embed_two_qubit(rho3, *, check: bool = False, tol: float = 1e-6) -> np.ndarray:
    """Isometric image of a three-level density matrix in the two-qubit space.

    With ``check=True`` the input is validated first and
    ``InvalidStateError`` raised if any defect exceeds ``tol``.
    """
    rho3 = np.asarray(rho3, dtype=np.complex128)
    if rho3.shape[-2:] != (3, 3):
        raise InvalidStateError(f"expected a 3x3 density matrix, got shape {rho3.shape}")
    if check:
        report = validate_density(rho3)
        if not report.ok(tol):
            raise InvalidStateError(f"invalid density matrix: {report}")
    return EMBEDDING @ rho3 @ EMBEDDING.conj().T


def partial_transpose(rho4) -> np.ndarray:
    """Transpose the second-qubit indices: ``((i,a),(j,b)) -> ((i,b),(j,a))``."""
    rho4 = np.asarray(rho4)
    batch = rho4.shape[:-2]
    t = rho4.reshape(batch + (2, 2, 2, 2))
    nb = len(batch)
    axes = tuple(range(nb)) + (nb, nb + 3, nb + 2, nb + 1)
    return t.transpose(axes).reshape(batch + (4, 4))


def negativity(rho4):
    """``max(0, -2 * sum of negative partial-transpose eigenvalues)``, clipped to [0, 1]."""
    pt = partial_transpose(rho4)
    lam = np.linalg.eigvalsh(0.5 * (pt + np.swapaxes(pt.conj(), -1, -2)))
    neg = np.where(lam < -NEG_EIG_TOL, lam, 0.0).sum(axis=-1)
    out = np.clip(-2.0 * neg, 0.0, 1.0) + 0.0
    return float(out) if out.ndim == 0 else out


def concurrence(rho4):
    """Wootters concurrence from the eigenvalues of ``rho (YY) conj(rho) (YY)``."""
    rho4 = np.asarray(rho4, dtype=np.complex128)
    tilde = SIGMA_YY @ rho4.conj() @ SIGMA_YY
    mu = np.linalg.eigvals(rho4 @ tilde).real
    mu = np.where(mu > CONCURRENCE_FLOOR, mu, 0.0)
    s = np.sqrt(-np.sort(-mu, axis=-1))
    c = s[..., 0] - s[..., 1] - s[..., 2] - s[..., 3]
    out = np.clip(c, 0.0, 1.0) + 0.0
    return float(out) if out.ndim == 0 else out
