"""Hot numerical kernels with a compiled core and a pure-Python fallback.

The compiled extension ``_ckernels`` is used when it is importable. Setting
the environment variable ``QDENT_KERNELS=python`` forces the fallback.
"""
import os

from . import _pykernels

STATUS_OK = _pykernels.STATUS_OK
STATUS_UNDERFLOW = _pykernels.STATUS_UNDERFLOW
STATUS_MAXSTEPS = _pykernels.STATUS_MAXSTEPS

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

if _ckernels is not None and os.environ.get("QDENT_KERNELS", "").lower() != "python":
    BACKEND = "cython"
    _impl = _ckernels
else:
    BACKEND = "python"
    _impl = _pykernels

rk4_doubling = _impl.rk4_doubling
jacobi_eigh = _impl.jacobi_eigh

__all__ = ["BACKEND", "rk4_doubling", "jacobi_eigh", "STATUS_OK",
           "STATUS_UNDERFLOW", "STATUS_MAXSTEPS"]
