import numpy as np
import pytest

from qdent.model import ModelParams


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_params(rng, gamma=0.0, span=10.0):
    return ModelParams.from_ratios(
        delta_ratio=rng.uniform(-span, span),
        eta_ratio=rng.uniform(-span, span),
        gamma_ratio=gamma,
        phi=rng.uniform(0.0, 2.0 * np.pi),
    )


def random_state(rng, dim=3):
    b = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return b / np.linalg.norm(b)


def random_density(rng, dim=3, rank=None):
    rank = dim if rank is None else rank
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_unitary(rng, dim=2):
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))
