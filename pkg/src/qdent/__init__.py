"""Exact dynamics and entanglement of two laser-driven, Forster-coupled quantum dots."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    DivergenceError,
    InvalidParameterError,
    InvalidStateError,
    NumericalError,
    QdentError,
    StepUnderflowError,
)
from .model import ModelParams, build_xi, validate_density  # noqa: E402
from .solver import (  # noqa: E402
    SpectralDecomposition,
    characteristic_coeffs,
    cubic_eigenvalues,
    evolve_pure,
    occupations,
    spectral_decompose,
)
from .lindblad import (  # noqa: E402
    PhononSpec,
    build_liouvillian,
    integrate_rk,
    jz_matrix,
    phonon_rate,
    propagate_expm,
)
from .entanglement import concurrence, embed_two_qubit, negativity, partial_transpose  # noqa: E402
from .sweep import SweepConfig, SweepResult, figure_preset, run_sweep  # noqa: E402
