"""Exponential time differencing steppers and the simulation driver.

Both schemes integrate the linear part L = kappa - eps^2 * Lap_h exactly in
Fourier space and treat the stabilized nonlinearity explicitly:

    first order:   U+ = F^-1[ a * F[U] + b * F[N(U)] ]
    second order:  V  = first-order step of U
                   U+ = V + F^-1[ c * (F[N(V)] - F[N(U)]) ]

with the per-mode scalars a, b, c from :class:`~macetd.spectral.PropagatorTables`.
The solver state caches the transform of the current field, so a step costs
two forward and one (first order) or two (second order) inverse transforms.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field as dataclass_field

import numpy as np
import scipy.fft as _fft

from .fields import GridSpec, check_field, discrete_energy, sup_frob_norm
from .matrices import stabilized_nonlinear_term
from .spectral import PropagatorTables, build_propagator, fft_workers

__all__ = [
    "Scheme",
    "SolverState",
    "MonitorSeries",
    "CheckResult",
    "DivergenceError",
    "etd1_step",
    "etdrk2_step",
    "integrate",
    "run_simulation",
    "check_mbp",
    "check_energy_monotone",
]


class Scheme(enum.Enum):
    ETD1 = "etd1"
    ETDRK2 = "etdrk2"


class DivergenceError(RuntimeError):
    """A step produced non-finite values."""

    def __init__(self, step_index: int, max_magnitude: float):
        self.step_index = step_index
        self.max_magnitude = max_magnitude
        super().__init__(
            f"non-finite field after step {step_index} "
            f"(max |entry| = {max_magnitude:.3e})"
        )


class SolverState:
    """Current field plus the reusable spectral buffers for one run.

    The propagator tables are full-spectrum; the state slices them to the
    half spectrum of the real FFT used internally. ``field_hat`` is kept in
    sync with ``field`` so consecutive steps skip one forward transform.
    """

    def __init__(self, field: np.ndarray, tables: PropagatorTables, workers: int | None = None):
        self.field = check_field(field, tables.grid)
        if self.field.shape[-1] < 2:
            raise ValueError("matrix dimension must be at least 2")
        self.step_index = 0
        self.workers = fft_workers() if workers is None else workers
        self.field_hat = None
        self._nl_buf = np.empty_like(self.field)
        self._load_tables(tables)

    def _load_tables(self, tables: PropagatorTables) -> None:
        # The real FFT keeps only the non-negative frequencies of the last
        # grid axis; the symbol is even in k, so slicing the table suffices.
        half = np.s_[..., : tables.grid.n // 2 + 1]
        self.tables = tables
        self._a = np.ascontiguousarray(tables.a[half])[..., None, None]
        self._b = np.ascontiguousarray(tables.b[half])[..., None, None]
        self._c = np.ascontiguousarray(tables.c[half])[..., None, None]

    @property
    def grid(self) -> GridSpec:
        return self.tables.grid

    @property
    def kappa(self) -> float:
        return self.tables.kappa

    @property
    def epsilon(self) -> float:
        return self.tables.epsilon

    @property
    def tau(self) -> float:
        return self.tables.tau

    def retime(self, tau: float) -> None:
        """Swap in tables for a different step size (final partial step)."""
        self._load_tables(
            build_propagator(self.grid, self.kappa, self.epsilon, tau)
        )

    # -- internal helpers -------------------------------------------------

    def _axes(self) -> tuple:
        return tuple(range(self.grid.d))

    def _forward(self, u: np.ndarray) -> np.ndarray:
        return _fft.rfftn(u, axes=self._axes(), workers=self.workers)

    def _inverse(self, modes: np.ndarray) -> np.ndarray:
        return _fft.irfftn(modes, s=self.grid.shape, axes=self._axes(), workers=self.workers)

    def _current_hat(self) -> np.ndarray:
        if self.field_hat is None:
            self.field_hat = self._forward(self.field)
        return self.field_hat

    def _commit(self, new_field: np.ndarray, new_hat: np.ndarray) -> np.ndarray:
        self.step_index += 1
        if not np.isfinite(new_field).all():
            with np.errstate(invalid="ignore"):
                worst = float(np.nanmax(np.abs(new_field)))
            raise DivergenceError(self.step_index, worst)
        self.field = new_field
        self.field_hat = new_hat
        return new_field


def etd1_step(state: SolverState) -> np.ndarray:
    """Advance one first-order step; returns the new field."""
    uh = state._current_hat()
    nl = stabilized_nonlinear_term(state.field, state.kappa, out=state._nl_buf)
    nh = state._forward(nl)
    new_hat = state._a * uh + state._b * nh
    return state._commit(state._inverse(new_hat), new_hat)


def etdrk2_step(state: SolverState, freeze_correction: bool = False) -> np.ndarray:
    """Advance one second-order step; returns the new field.

    ``freeze_correction`` is a testing hook that reuses N(U) in place of
    N(V), which zeroes the correction and must reproduce the first-order
    step exactly.
    """
    uh = state._current_hat()
    nl = stabilized_nonlinear_term(state.field, state.kappa, out=state._nl_buf)
    nh = state._forward(nl)
    tilde_hat = state._a * uh + state._b * nh
    tilde = state._inverse(tilde_hat)
    source = state.field if freeze_correction else tilde
    nl2 = stabilized_nonlinear_term(source, state.kappa, out=state._nl_buf)
    n2h = state._forward(nl2)
    n2h -= nh
    n2h *= state._c
    n2h += tilde_hat
    return state._commit(state._inverse(n2h), n2h)


_STEPPERS = {Scheme.ETD1: etd1_step, Scheme.ETDRK2: etdrk2_step}


def integrate(
    field: np.ndarray,
    tables: PropagatorTables,
    scheme: Scheme,
    num_steps: int,
    workers: int | None = None,
) -> np.ndarray:
    """Run ``num_steps`` steps without monitoring; returns the final field."""
    state = SolverState(field, tables, workers=workers)
    step = _STEPPERS[Scheme(scheme)]
    for _ in range(num_steps):
        step(state)
    return state.field


@dataclass
class MonitorSeries:
    """Append-only (t, sup Frobenius norm, energy) records of one run."""

    times: list = dataclass_field(default_factory=list)
    sup_norms: list = dataclass_field(default_factory=list)
    energies: list = dataclass_field(default_factory=list)

    def append(self, t: float, sup_norm: float, energy: float) -> None:
        if self.times and t <= self.times[-1]:
            raise ValueError(f"record times must increase: {t} after {self.times[-1]}")
        self.times.append(float(t))
        self.sup_norms.append(float(sup_norm))
        self.energies.append(float(energy))

    def __len__(self) -> int:
        return len(self.times)


@dataclass(frozen=True)
class CheckResult:
    passed: bool
    first_violation: int | None = None
    detail: str = ""

    def __bool__(self) -> bool:
        return self.passed


def check_mbp(series: MonitorSeries, m: int, tol: float = 1e-9) -> CheckResult:
    """Pass iff every recorded sup norm stays within sqrt(m) + tol."""
    if not len(series):
        raise ValueError("empty monitor series")
    bound = np.sqrt(m) + tol
    for i, s in enumerate(series.sup_norms):
        if s > bound:
            return CheckResult(
                False, i, f"sup norm {s!r} exceeds bound {bound!r} at t={series.times[i]!r}"
            )
    return CheckResult(True)


def check_energy_monotone(series: MonitorSeries, tol: float = 1e-10) -> CheckResult:
    """Pass iff consecutive energy differences stay below tol*max(1, |E0|)."""
    if not len(series):
        raise ValueError("empty monitor series")
    allowed = tol * max(1.0, abs(series.energies[0]))
    for i in range(1, len(series)):
        rise = series.energies[i] - series.energies[i - 1]
        if rise > allowed:
            return CheckResult(
                False, i, f"energy rises by {rise!r} at t={series.times[i]!r}"
            )
    return CheckResult(True)


def run_simulation(config, snapshot_sink=None, workers: int | None = None) -> MonitorSeries:
    """Step a configured experiment from t=0 to t_end with monitoring.

    ``config`` is a :class:`~macetd.config.SimConfig`. Monitor records are
    appended every ``monitor_stride`` accepted steps, always including t=0
    and t=t_end. ``snapshot_sink``, if given, is called as
    ``snapshot_sink(t, field)`` at each configured snapshot time (fired at
    the first step boundary reaching it). When t_end is not a multiple of
    tau, a one-off propagator covers the remainder so the run lands on
    t_end exactly.
    """
    from .initial_conditions import make_initial_field

    grid = GridSpec(config.d, config.n)
    u0 = make_initial_field(config.initial_condition, grid, config.m, config.ic_params)
    tables = build_propagator(grid, config.kappa, config.epsilon, config.tau)
    state = SolverState(u0, tables, workers=workers)
    step = _STEPPERS[Scheme(config.scheme)]

    series = MonitorSeries()
    time_tol = 1e-9 * max(1.0, config.t_end)
    pending = sorted(set(config.snapshot_times))

    def record(t: float) -> None:
        series.append(t, sup_frob_norm(state.field), discrete_energy(state.field, config.epsilon))

    def emit_snapshots(t: float) -> None:
        while pending and t >= pending[0] - time_tol:
            pending.pop(0)
            if snapshot_sink is not None:
                snapshot_sink(t, state.field)

    record(0.0)
    emit_snapshots(0.0)

    full_steps = int(np.floor(config.t_end / config.tau + 1e-9))
    remainder = config.t_end - full_steps * config.tau
    if remainder <= 1e-12 * max(1.0, config.t_end):
        remainder = 0.0

    for n in range(1, full_steps + 1):
        step(state)
        t = n * config.tau if remainder or n < full_steps else config.t_end
        last = n == full_steps and not remainder
        if n % config.monitor_stride == 0 or last:
            record(t)
        emit_snapshots(t)
    if remainder:
        state.retime(remainder)
        step(state)
        record(config.t_end)
        emit_snapshots(config.t_end)
    return series
