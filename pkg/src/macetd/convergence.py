"""Temporal convergence studies against a fine-step reference solution.

The reference shares the grid with the runs under study, so the spatial
discretization error cancels and the observed rates isolate the temporal
order. By default the reference is the second-order scheme at one hundredth
of the smallest step under study.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fields import GridSpec, l2_field_norm, sup_frob_norm
from .initial_conditions import make_initial_field
from .spectral import build_propagator
from .stepping import DivergenceError, Scheme, integrate

__all__ = ["ConvergenceReport", "convergence_study", "observed_rates", "reference_solution"]

REF_FACTOR_DEFAULT = 100


@dataclass(frozen=True)
class ConvergenceReport:
    scheme: Scheme
    tau_list: tuple
    l2_errors: tuple
    linf_errors: tuple
    l2_rates: tuple
    linf_rates: tuple
    failed: tuple

    def rows(self):
        """(tau, l2, l2 rate, linf, linf rate) per step size; rates are None
        on the first row."""
        out = []
        for i, tau in enumerate(self.tau_list):
            out.append(
                (
                    tau,
                    self.l2_errors[i],
                    self.l2_rates[i - 1] if i else None,
                    self.linf_errors[i],
                    self.linf_rates[i - 1] if i else None,
                )
            )
        return out


def observed_rates(errors) -> tuple:
    """log2 of consecutive error ratios (for step sizes halving)."""
    errors = list(errors)
    rates = []
    for a, b in zip(errors, errors[1:]):
        if a > 0 and b > 0 and np.isfinite(a) and np.isfinite(b):
            rates.append(float(np.log2(a / b)))
        else:
            rates.append(float("nan"))
    return tuple(rates)


def _num_steps(t_end: float, tau: float) -> int:
    ratio = t_end / tau
    steps = round(ratio)
    if steps < 1 or abs(ratio - steps) > 1e-9 * max(1.0, abs(ratio)):
        raise ValueError(f"t_end={t_end} is not a multiple of tau={tau}")
    return steps


def reference_solution(
    u0: np.ndarray,
    grid: GridSpec,
    kappa: float,
    epsilon: float,
    t_end: float,
    tau_ref: float,
    workers: int | None = None,
) -> np.ndarray:
    """Second-order solution at t_end with step tau_ref (exact divisor of t_end)."""
    steps = _num_steps(t_end, tau_ref)
    tables = build_propagator(grid, kappa, epsilon, t_end / steps)
    return integrate(u0, tables, Scheme.ETDRK2, steps, workers=workers)


def convergence_study(
    scheme,
    grid: GridSpec,
    example: str,
    tau_list,
    t_end: float,
    epsilon: float = 0.01,
    kappa: float = 5.0,
    params: dict | None = None,
    reference: np.ndarray | None = None,
    ref_factor: int = REF_FACTOR_DEFAULT,
    workers: int | None = None,
) -> ConvergenceReport:
    """Errors and observed orders at t_end for each step size in tau_list.

    ``tau_list`` must be decreasing and each entry must divide t_end. A run
    that diverges is flagged (NaN errors) instead of aborting the study.
    An explicit ``reference`` field bypasses the built-in reference run.
    """
    scheme = Scheme(scheme)
    tau_list = [float(t) for t in tau_list]
    if any(b >= a for a, b in zip(tau_list, tau_list[1:])):
        raise ValueError("tau_list must be strictly decreasing")
    u0 = make_initial_field(example, grid, params=params)
    if reference is None:
        reference = reference_solution(
            u0, grid, kappa, epsilon, t_end, min(tau_list) / ref_factor, workers=workers
        )

    l2, linf, failed = [], [], []
    for tau in tau_list:
        steps = _num_steps(t_end, tau)
        tables = build_propagator(grid, kappa, epsilon, t_end / steps)
        try:
            u = integrate(u0, tables, scheme, steps, workers=workers)
        except DivergenceError:
            l2.append(float("nan"))
            linf.append(float("nan"))
            failed.append(True)
            continue
        diff = u - reference
        l2.append(l2_field_norm(diff))
        linf.append(sup_frob_norm(diff))
        failed.append(False)

    return ConvergenceReport(
        scheme=scheme,
        tau_list=tuple(tau_list),
        l2_errors=tuple(l2),
        linf_errors=tuple(linf),
        l2_rates=observed_rates(l2),
        linf_rates=observed_rates(linf),
        failed=tuple(failed),
    )
