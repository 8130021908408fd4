import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_density, random_state, random_unitary
from qdent.entanglement import (ANTISYMMETRIC, concurrence, embed_state, embed_two_qubit,
                                negativity, partial_transpose)
from qdent.errors import InvalidStateError
from qdent.model import ModelParams, basis_state, build_xi, pure_density
from qdent.solver import evolve_pure, spectral_decompose

BELL = np.array([1, 0, 0, 1]) / np.sqrt(2)


def _dm(psi):
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


def werner(p):
    return p * _dm(BELL) + (1 - p) * np.eye(4) / 4


def test_embed_single_exciton():
    rho4 = embed_two_qubit(pure_density(basis_state(1)))
    expected = np.zeros((4, 4))
    expected[1:3, 1:3] = 0.5
    np.testing.assert_allclose(rho4, expected, atol=1e-15)


def test_embed_vacuum():
    np.testing.assert_allclose(embed_two_qubit(pure_density(basis_state(0))), _dm([1, 0, 0, 0]))


def test_embed_maximally_mixed_spectrum():
    lam = np.linalg.eigvalsh(embed_two_qubit(np.eye(3) / 3))
    np.testing.assert_allclose(lam, [0, 1 / 3, 1 / 3, 1 / 3], atol=1e-15)


def test_embed_isometry(rng):
    for _ in range(20):
        rho = random_density(rng)
        rho4 = embed_two_qubit(rho)
        assert np.trace(rho4).real == pytest.approx(1.0, abs=1e-14)
        np.testing.assert_allclose(np.linalg.eigvalsh(rho4)[1:], np.linalg.eigvalsh(rho), atol=1e-13)
        assert abs(ANTISYMMETRIC.conj() @ rho4 @ ANTISYMMETRIC) <= 1e-12
        np.testing.assert_allclose(rho4 @ ANTISYMMETRIC, 0, atol=1e-12)


def test_embed_validation():
    with pytest.raises(InvalidStateError):
        embed_two_qubit(np.eye(3), check=True)
    with pytest.raises(InvalidStateError):
        embed_two_qubit(np.eye(4) / 4)


def test_partial_transpose_examples():
    prod = _dm([1, 0, 0, 0])
    np.testing.assert_array_equal(partial_transpose(prod), prod)
    lam = np.linalg.eigvalsh(partial_transpose(_dm(BELL)))
    np.testing.assert_allclose(lam, [-0.5, 0.5, 0.5, 0.5], atol=1e-15)


def test_partial_transpose_index_map(rng):
    rho = random_density(rng, 4)
    pt = partial_transpose(rho)
    for i in range(2):
        for a in range(2):
            for j in range(2):
                for b in range(2):
                    assert pt[2 * i + a, 2 * j + b] == rho[2 * i + b, 2 * j + a]


def test_partial_transpose_involution_and_batch(rng):
    stack = np.stack([random_density(rng, 4) for _ in range(5)])
    np.testing.assert_array_equal(partial_transpose(partial_transpose(stack)), stack)
    np.testing.assert_array_equal(partial_transpose(stack)[3], partial_transpose(stack[3]))


def test_negativity_examples():
    assert negativity(embed_two_qubit(pure_density(basis_state(1)))) == pytest.approx(1.0, abs=1e-12)
    assert negativity(_dm([1, 0, 0, 0])) == 0.0
    # oracle: PT of the Werner family has lowest eigenvalue (1 - 3p)/4
    lam = np.linalg.eigvalsh(partial_transpose(werner(0.5)))
    assert lam[0] == pytest.approx((1 - 3 * 0.5) / 4, abs=1e-15)
    assert negativity(werner(0.5)) == pytest.approx(0.25, abs=1e-12)
    assert negativity(werner(1 / 3)) == pytest.approx(0.0, abs=1e-12)


def test_concurrence_examples():
    assert concurrence(_dm(BELL)) == pytest.approx(1.0, abs=1e-12)
    assert concurrence(_dm([0.5, -0.5j, -0.5j, -0.5])) == pytest.approx(0.0, abs=1e-12)
    assert concurrence(werner(0.5)) == pytest.approx(0.25, abs=1e-12)
    assert concurrence(embed_two_qubit(pure_density(basis_state(1)))) == pytest.approx(1.0, abs=1e-12)


def test_driven_uncoupled_state_at_quarter_period():
    d = spectral_decompose(build_xi(ModelParams()))
    psi = embed_state(evolve_pure(d, basis_state(0), np.pi / 2))
    np.testing.assert_allclose(psi, [0.5, -0.5j, -0.5j, -0.5], atol=1e-14)
    assert negativity(_dm(psi)) <= 1e-12 and concurrence(_dm(psi)) <= 1e-12


def test_pure_state_equality(rng):
    b = rng.normal(size=(1000, 3)) + 1j * rng.normal(size=(1000, 3))
    b /= np.linalg.norm(b, axis=1, keepdims=True)
    psi = embed_state(b)
    rho4 = psi[:, :, None] * psi[:, None, :].conj()
    exact = 2 * np.abs(psi[:, 0] * psi[:, 3] - psi[:, 1] * psi[:, 2])
    np.testing.assert_allclose(negativity(rho4), exact, atol=1e-9)
    np.testing.assert_allclose(concurrence(rho4), exact, atol=1e-9)


def test_range_on_random_mixed(rng):
    for rank in (1, 2, 4):
        rhos = np.stack([random_density(rng, 4, rank) for _ in range(200)])
        for values in (negativity(rhos), concurrence(rhos)):
            assert np.all((values >= 0) & (values <= 1))


def test_local_unitary_invariance(rng):
    for _ in range(50):
        rho = random_density(rng, 4, rank=int(rng.integers(1, 5)))
        u = np.kron(random_unitary(rng), random_unitary(rng))
        rot = u @ rho @ u.conj().T
        assert negativity(rot) == pytest.approx(negativity(rho), abs=1e-10)
        assert concurrence(rot) == pytest.approx(concurrence(rho), abs=1e-10)


@settings(max_examples=60, deadline=None)
@given(st.floats(0, 1))
def test_werner_family_closed_forms(p):
    expected = max(0.0, (3 * p - 1) / 2)
    assert negativity(werner(p)) == pytest.approx(expected, abs=1e-9)
    assert concurrence(werner(p)) == pytest.approx(expected, abs=1e-7)


@pytest.mark.parametrize("delta", [0.0, 1.0, 5.0])
@pytest.mark.parametrize("phi", [0.0, 1.1])
def test_uncoupled_dots_stay_separable(delta, phi):
    d = spectral_decompose(build_xi(ModelParams(delta=delta, phi=phi)))
    psi = embed_state(evolve_pure(d, basis_state(0), np.linspace(0, 25, 501)))
    rho4 = psi[:, :, None] * psi[:, None, :].conj()
    assert np.max(negativity(rho4)) <= 1e-9
    assert np.max(concurrence(rho4)) <= 1e-9
