import os
import subprocess
import sys

import numpy as np
import pytest
from scipy.linalg import expm

from qdent import _kernels
from qdent._kernels import _pykernels

BACKENDS = [pytest.param(_pykernels, id="python")]
if _kernels._ckernels is not None:
    BACKENDS.append(pytest.param(_kernels._ckernels, id="cython"))


def _problem(rng, n):
    h = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return h + h.conj().T


@pytest.mark.parametrize("impl", BACKENDS)
def test_rk4_doubling_matches_exponential(impl, rng):
    a = -1j * _problem(rng, 3)
    y0 = np.array([1.0, 0.0, 0.0], dtype=complex)
    ts = np.array([0.0, 0.3, 1.0, 2.5])
    ys, n_acc, status = impl.rk4_doubling(a, y0, ts, 1e-12, 1e-12, 10**7)
    assert status == _kernels.STATUS_OK and n_acc > 0
    for t, y in zip(ts, ys):
        np.testing.assert_allclose(y, expm(a * t) @ y0, atol=1e-10)


@pytest.mark.parametrize("impl", BACKENDS)
def test_rk4_doubling_status_codes(impl):
    a = np.array([[0, 1], [-1, 0]], dtype=complex)
    _, _, status = impl.rk4_doubling(a, [1, 0], [5.0], 1e-25, 1e-6, 10**7)
    assert status == _kernels.STATUS_UNDERFLOW
    _, _, status = impl.rk4_doubling(a, [1, 0], [5.0], 1e-12, 1e-14, 3)
    assert status == _kernels.STATUS_MAXSTEPS


@pytest.mark.parametrize("impl", BACKENDS)
@pytest.mark.parametrize("n", [2, 3, 4, 9])
def test_jacobi_matches_lapack(impl, n, rng):
    h = _problem(rng, n)
    w, v, sweeps = impl.jacobi_eigh(h, 1e-15, 50)
    assert sweeps >= 0
    np.testing.assert_allclose(w, np.linalg.eigvalsh(h), atol=1e-12 * np.abs(h).max())
    np.testing.assert_allclose(v.conj().T @ v, np.eye(n), atol=1e-13)
    np.testing.assert_allclose((v * w) @ v.conj().T, h, atol=1e-12 * np.abs(h).max())


def test_jacobi_diagonal_input_needs_no_sweep():
    w, v, sweeps = _pykernels.jacobi_eigh(np.diag([3.0, -1.0, 2.0]), 1e-15, 10)
    assert sweeps == 0
    np.testing.assert_array_equal(w, [-1.0, 2.0, 3.0])


@pytest.mark.skipif(_kernels._ckernels is None, reason="compiled kernels not built")
def test_backends_agree_to_rounding(rng):
    a = -1j * _problem(rng, 9)
    y0 = rng.normal(size=9) + 0j
    ts = np.linspace(0, 2, 7)
    yp, np_, _ = _pykernels.rk4_doubling(a, y0, ts, 1e-12, 1e-12, 10**7)
    yc, nc, _ = _kernels._ckernels.rk4_doubling(a, y0, ts, 1e-12, 1e-12, 10**7)
    assert np_ == nc
    np.testing.assert_allclose(yp, yc, atol=1e-12)
    h = _problem(rng, 4)
    wp, vp, _ = _pykernels.jacobi_eigh(h, 1e-15, 50)
    wc, vc, _ = _kernels._ckernels.jacobi_eigh(h, 1e-15, 50)
    np.testing.assert_allclose(wp, wc, atol=1e-13)
    np.testing.assert_allclose(vp, vc, atol=1e-12)


def test_env_var_forces_python_backend():
    env = dict(os.environ, QDENT_KERNELS="python")
    out = subprocess.run([sys.executable, "-c", "import qdent._kernels as k; print(k.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


@pytest.mark.parametrize("impl", BACKENDS)
def test_kernels_accept_read_only_inputs(impl, rng):
    h = _problem(rng, 3)
    a = -1j * h
    y0 = np.array([0.0, 1.0, 0.0], dtype=complex)
    ts = np.array([0.0, 1.0])
    for arr in (h, a, y0, ts):
        arr.setflags(write=False)
    ys, _, status = impl.rk4_doubling(a, y0, ts, 1e-12, 1e-12, 10**7)
    assert status == _kernels.STATUS_OK
    np.testing.assert_allclose(ys[-1], expm(a) @ y0, atol=1e-10)
    w, _, sweeps = impl.jacobi_eigh(h, 1e-15, 50)
    assert sweeps >= 0
    np.testing.assert_allclose(w, np.linalg.eigvalsh(h), atol=1e-10)
