"""Observables on rectangular (Omega t x parameter) grids and figure presets.

Everything here works in units of the laser coupling: times are ``Omega t``
and swept parameters are the ratios ``delta/Omega``, ``eta/Omega``,
``gamma/Omega`` (or the phase ``phi``).
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .entanglement import concurrence, embed_state, embed_two_qubit, negativity
from .errors import InvalidParameterError, InvalidStateError, QdentError
from .lindblad import build_liouvillian, propagate_grid
from .model import ModelParams, as_state_vector, basis_state, build_xi, validate_density
from .solver import evolve_pure, spectral_decompose

OBSERVABLES = ("p0", "p1", "p2", "negativity", "concurrence")
PARAM_FIELDS = {"delta_ratio": "delta", "eta_ratio": "eta", "gamma_ratio": "gamma", "phi": "phi"}
METHODS = ("closed-form", "lindblad")
RANGE_SLACK = 1e-9


@dataclass(frozen=True)
class SweepConfig:
    base: ModelParams = field(default_factory=ModelParams)
    t_max: float = 25.0
    n_steps: int = 501
    param: str = "delta_ratio"
    param_min: float = 0.0
    param_max: float = 10.0
    n_points: int = 101
    initial: np.ndarray = field(default_factory=lambda: basis_state(0))
    observables: tuple = ("p0", "p1", "p2")
    method: str = "closed-form"
    preset: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "observables", tuple(self.observables))
        object.__setattr__(self, "initial", np.asarray(self.initial, dtype=np.complex128))
        self.validate()

    def validate(self):
        if self.base.omega != 1.0:
            raise InvalidParameterError("sweep base parameters must be normalized (omega = 1)")
        if not (np.isfinite(self.t_max) and self.t_max > 0):
            raise InvalidParameterError(f"t_max must be > 0, got {self.t_max!r}")
        if int(self.n_steps) != self.n_steps or self.n_steps < 2:
            raise InvalidParameterError(f"n_steps must be an integer >= 2, got {self.n_steps!r}")
        if int(self.n_points) != self.n_points or self.n_points < 1:
            raise InvalidParameterError(f"n_points must be an integer >= 1, got {self.n_points!r}")
        if self.param not in PARAM_FIELDS:
            raise InvalidParameterError(
                f"unknown sweep parameter {self.param!r}; choose from {sorted(PARAM_FIELDS)}")
        if not (np.isfinite(self.param_min) and np.isfinite(self.param_max)):
            raise InvalidParameterError("parameter range must be finite")
        if self.param_max < self.param_min:
            raise InvalidParameterError("param_max must be >= param_min")
        if self.param == "gamma_ratio" and self.param_min < 0:
            raise InvalidParameterError("gamma_ratio must be >= 0")
        if not self.observables:
            raise InvalidParameterError("at least one observable is required")
        bad = [o for o in self.observables if o not in OBSERVABLES]
        if bad:
            raise InvalidParameterError(f"unknown observables {bad}; choose from {OBSERVABLES}")
        if self.method not in METHODS:
            raise InvalidParameterError(f"method must be one of {METHODS}, got {self.method!r}")
        if self.method == "closed-form":
            gmax = self.param_max if self.param == "gamma_ratio" else self.base.gamma
            if gmax > 0:
                raise InvalidParameterError("closed-form method requires gamma = 0")
        _check_initial(self.initial)

    @property
    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.t_max, int(self.n_steps))

    @property
    def param_values(self) -> np.ndarray:
        return np.linspace(self.param_min, self.param_max, int(self.n_points))

    def params_at(self, value: float) -> ModelParams:
        return self.base.with_(**{PARAM_FIELDS[self.param]: float(value)})


def _check_initial(initial):
    if initial.shape == (3,):
        try:
            as_state_vector(initial)
        except InvalidStateError as exc:
            raise InvalidParameterError(f"initial state is invalid: {exc}") from exc
    elif initial.shape == (3, 3):
        report = validate_density(initial)
        if not report.ok(1e-10, 1e-9):
            raise InvalidParameterError(f"initial density matrix is invalid: {report}")
    else:
        raise InvalidParameterError(f"initial state must have shape (3,) or (3, 3), got {initial.shape}")


@dataclass(frozen=True)
class SweepResult:
    """Grid of observables, ``data[i_param, i_time, i_observable]``."""

    config: SweepConfig
    param_values: np.ndarray
    times: np.ndarray
    observables: tuple
    data: np.ndarray

    def observable(self, name: str) -> np.ndarray:
        """``(n_points, n_steps)`` slice for one observable."""
        return self.data[:, :, self.observables.index(name)]


PRESETS = {
    "fig1": dict(base=dict(delta_ratio=0.0, eta_ratio=0.1, gamma_ratio=0.0),
                 param="delta_ratio", observables=("p0", "p1", "p2")),
    "fig2": dict(base=dict(delta_ratio=0.0, eta_ratio=0.0, gamma_ratio=0.0),
                 param="eta_ratio", observables=("p0", "p1", "p2")),
    "fig3a": dict(base=dict(delta_ratio=0.0, eta_ratio=0.1, gamma_ratio=0.0),
                  param="delta_ratio", observables=("negativity",)),
    "fig3b": dict(base=dict(delta_ratio=0.0, eta_ratio=0.0, gamma_ratio=0.0),
                  param="eta_ratio", observables=("negativity",)),
    "fig4a": dict(base=dict(delta_ratio=0.0, eta_ratio=0.0, gamma_ratio=0.01),
                  param="eta_ratio", observables=("negativity",)),
    "fig4b": dict(base=dict(delta_ratio=0.0, eta_ratio=0.0, gamma_ratio=0.05),
                  param="eta_ratio", observables=("negativity",)),
}


def normalize_preset_id(preset_id: str) -> str:
    key = str(preset_id).strip().lower()
    if not key.startswith("fig"):
        key = "fig" + key
    if key not in PRESETS:
        raise InvalidParameterError(
            f"unknown figure preset {preset_id!r}; choose from {', '.join(PRESETS)}")
    return key


def figure_preset(preset_id: str) -> SweepConfig:
    """Sweep configuration behind one of the published figures.

    Accepts ``"fig1"`` ... ``"fig4b"`` or the short forms ``"1"`` ... ``"4b"``.
    The swept ratio runs over [0, 10] with 101 points and ``Omega t`` over
    [0, 25] with 501 samples; the initial state is the vacuum.
    """
    key = normalize_preset_id(preset_id)
    spec = PRESETS[key]
    base = ModelParams.from_ratios(**spec["base"])
    return SweepConfig(
        base=base,
        t_max=25.0,
        n_steps=501,
        param=spec["param"],
        param_min=0.0,
        param_max=10.0,
        n_points=101,
        initial=basis_state(0),
        observables=spec["observables"],
        method="lindblad" if base.gamma > 0 else "closed-form",
        preset=key,
    )


def trajectory(params: ModelParams, initial, times, method: str) -> np.ndarray:
    """States along ``times``: amplitudes ``(nt, 3)`` or density matrices ``(nt, 3, 3)``.

    Amplitudes are returned only for the closed-form method with a pure
    initial state.
    """
    initial = np.asarray(initial, dtype=np.complex128)
    if method == "closed-form":
        if params.gamma > 0:
            raise InvalidParameterError("closed-form method requires gamma = 0")
        decomp = spectral_decompose(build_xi(params))
        if initial.ndim == 1:
            return evolve_pure(decomp, initial, times)
        u = decomp.propagator(times)
        return u @ initial @ np.swapaxes(u.conj(), -1, -2)
    if method == "lindblad":
        rho0 = np.outer(initial, initial.conj()) if initial.ndim == 1 else initial
        return propagate_grid(build_liouvillian(params), rho0, times)
    raise InvalidParameterError(f"unknown method {method!r}")


def observables_of(states: np.ndarray, names) -> np.ndarray:
    """Evaluate observables on a stack of states; returns ``(nt, len(names))``."""
    names = tuple(names)
    out = np.empty((states.shape[0], len(names)))
    pure = states.ndim == 2
    if pure:
        pops = states.real ** 2 + states.imag ** 2
    else:
        pops = np.real(np.diagonal(states, axis1=-2, axis2=-1))
    rho4 = None
    for k, name in enumerate(names):
        if name in ("p0", "p1", "p2"):
            out[:, k] = pops[:, int(name[1])]
            continue
        if rho4 is None:
            if pure:
                psi = embed_state(states)
                rho4 = psi[:, :, None] * psi[:, None, :].conj()
            else:
                rho4 = embed_two_qubit(states)
        out[:, k] = negativity(rho4) if name == "negativity" else concurrence(rho4)
    return out


def _check_range(values, where):
    if not np.all(np.isfinite(values)):
        raise QdentError(f"{where}: non-finite observable")
    if np.any(values < -RANGE_SLACK) or np.any(values > 1.0 + RANGE_SLACK):
        raise QdentError(f"{where}: observable outside [0, 1]")


def time_series(params: ModelParams, initial, times, observables=OBSERVABLES,
                method: str | None = None) -> np.ndarray:
    """Observables along ``times`` for a single parameter point.

    ``method=None`` picks the closed form when ``gamma == 0``.
    """
    if method is None:
        method = "closed-form" if params.gamma == 0 else "lindblad"
    values = observables_of(trajectory(params, initial, times, method), observables)
    _check_range(values, "time series")
    return values


def run_sweep(config: SweepConfig, workers: int = 1) -> SweepResult:
    """Evaluate ``config`` on its full grid.

    Each parameter point is decomposed once and then evaluated at all
    times. With ``workers > 1`` points run on a thread pool; the result is
    identical to the serial one.
    """
    times = config.times
    values = config.param_values

    def point(i):
        value = values[i]
        try:
            params = config.params_at(value)
            states = trajectory(params, config.initial, times, config.method)
            data = observables_of(states, config.observables)
            _check_range(data, "sweep")
        except QdentError as exc:
            raise type(exc)(f"{config.param}={value:.9g} (point {i}): {exc}") from exc
        return data

    if workers > 1 and len(values) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(point, range(len(values))))
    else:
        rows = [point(i) for i in range(len(values))]
    return SweepResult(config, values, times, config.observables, np.stack(rows))


def windowed_max(times, values, window: float) -> np.ndarray:
    """Maximum of ``values`` over consecutive windows ``[k w, (k+1) w]``."""
    times = np.asarray(times)
    values = np.asarray(values)
    n = int(np.ceil(times[-1] / window - 1e-12))
    out = np.empty(n)
    for k in range(n):
        mask = (times >= k * window - 1e-12) & (times <= (k + 1) * window + 1e-12)
        out[k] = values[mask].max()
    return out


def settling_time(times, values, floor: float) -> float:
    """Earliest time after which ``values`` stays at or below ``floor``.

    Returns ``inf`` if the last sample is still above the floor.
    """
    values = np.asarray(values)
    above = np.nonzero(values > floor)[0]
    if above.size == 0:
        return float(times[0])
    if above[-1] == len(values) - 1:
        return float("inf")
    return float(times[above[-1] + 1])
