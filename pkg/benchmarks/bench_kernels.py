"""Compare the compiled and pure-Python kernels.

Usage::

    python3 benchmarks/bench_kernels.py [--repeat 3]

Times the adaptive RK4 integrator on a 9x9 dephasing Liouvillian and the
Jacobi eigensolver on 3x3 Hermitian matrices, and checks that both
backends return the same numbers.
"""
import argparse
import timeit

import numpy as np

from qdent import _kernels
from qdent._kernels import _pykernels
from qdent.lindblad import build_liouvillian, vec
from qdent.model import ModelParams, basis_state, pure_density


def rk_case():
    params = ModelParams.from_ratios(delta_ratio=0.5, eta_ratio=3.0, gamma_ratio=0.05)
    lv = np.ascontiguousarray(build_liouvillian(params))
    y0 = vec(pure_density(basis_state(0)))
    ts = np.linspace(0.0, 20.0, 41)
    return lambda impl: impl.rk4_doubling(lv, y0, ts, 1e-12, 1e-12, 10**8)


def jacobi_case(n_mats=2000):
    rng = np.random.default_rng(0)
    h = rng.normal(size=(n_mats, 3, 3)) + 1j * rng.normal(size=(n_mats, 3, 3))
    h = h + np.swapaxes(h.conj(), 1, 2)

    def run(impl):
        return [impl.jacobi_eigh(m, 1e-15, 50)[0] for m in h]
    return run


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)

    ck = _kernels._ckernels
    if ck is None:
        print("compiled kernels not built; run `pip install -e . --no-build-isolation`")
        return 1
    print(f"{'kernel':<10} {'python [s]':>11} {'cython [s]':>11} {'speedup':>8}")
    for name, case in (("rk4", rk_case()), ("jacobi", jacobi_case())):
        ref, fast = case(_pykernels), case(ck)
        if name == "rk4":
            assert np.allclose(ref[0], fast[0], atol=1e-12, rtol=0)
        else:
            assert np.allclose(ref, fast, atol=1e-12, rtol=0)
        t_py = min(timeit.repeat(lambda: case(_pykernels), number=1, repeat=args.repeat))
        t_c = min(timeit.repeat(lambda: case(ck), number=1, repeat=args.repeat))
        print(f"{name:<10} {t_py:>11.4f} {t_c:>11.4f} {t_py / t_c:>7.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
