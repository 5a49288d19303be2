"""Randomized verification of the matrix inequalities behind the solver.

Three sampled bounds justify the scheme parameters:

  * norm bound: ||kappa V + f(V)||_F <= kappa sqrt(m) on the ball
    ||V||_F <= sqrt(m), for kappa >= max(3m/2 - 1, 2) (tight on the
    orthogonal group, where f vanishes);
  * Lipschitz bound: the stabilized nonlinearity has constant
    kappa + 1 + 5m on that ball;
  * energy bound: the potential difference plus the linearization term is
    dominated by (kappa/2) ||U1 - U2||_F^2 once kappa >= 3m - 1.

Samples draw a Gaussian direction and a Frobenius radius uniform on
[0, sqrt(m)], so the boundary where the bounds are tight is well covered.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .matrices import frob_inner, frob_norm, nonlinear_term, potential_trace, stabilized_nonlinear_term
from .spectral import dissipation_symbol_check

__all__ = [
    "LemmaCheck",
    "LemmaSuiteReport",
    "sample_bounded_matrices",
    "mbp_kappa",
    "energy_kappa",
    "check_norm_bound",
    "check_lipschitz_bound",
    "check_energy_inequality",
    "lemma_suite",
]


def mbp_kappa(m: int) -> float:
    """Smallest stabilization keeping the sup-norm bound: max(3m/2 - 1, 2)."""
    return max(1.5 * m - 1.0, 2.0)


def energy_kappa(m: int) -> float:
    """Smallest stabilization keeping monotone energy: 3m - 1."""
    return 3.0 * m - 1.0


def sample_bounded_matrices(rng: np.random.Generator, m: int, count: int) -> np.ndarray:
    """Matrices with Frobenius norm uniform on [0, sqrt(m)], Gaussian direction."""
    g = rng.standard_normal((count, m, m))
    norms = np.maximum(frob_norm(g), np.finfo(float).tiny)
    radii = np.sqrt(m) * rng.random(count)
    return g * (radii / norms)[:, None, None]


def check_norm_bound(v: np.ndarray, kappa: float, m: int) -> np.ndarray:
    """Slack kappa sqrt(m) - ||kappa V + f(V)||_F, per sample (>= 0 expected)."""
    return kappa * np.sqrt(m) - frob_norm(stabilized_nonlinear_term(v, kappa))


def check_lipschitz_bound(v1: np.ndarray, v2: np.ndarray, kappa: float, m: int) -> np.ndarray:
    """Slack (kappa+1+5m) ||V1-V2|| - ||N(V1)-N(V2)||, per pair."""
    lhs = frob_norm(stabilized_nonlinear_term(v1, kappa) - stabilized_nonlinear_term(v2, kappa))
    return (kappa + 1.0 + 5.0 * m) * frob_norm(v1 - v2) - lhs


def check_energy_inequality(u1: np.ndarray, u2: np.ndarray, kappa: float) -> np.ndarray:
    """Slack (kappa/2) ||U1-U2||^2 - [W(U1) - W(U2) + <U1-U2, f(U2)>], per pair."""
    lhs = potential_trace(u1) - potential_trace(u2) + frob_inner(u1 - u2, nonlinear_term(u2))
    return 0.5 * kappa * frob_norm(u1 - u2) ** 2 - lhs


@dataclass(frozen=True)
class LemmaCheck:
    name: str
    m: int
    kappa: float
    samples: int
    min_slack: float
    violations: tuple

    @property
    def passed(self) -> bool:
        return not self.violations


@dataclass(frozen=True)
class LemmaSuiteReport:
    checks: tuple
    seed: int
    tol: float

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> tuple:
        return tuple(c for c in self.checks if not c.passed)


def _collect(name, m, kappa, slack, tol, payloads) -> LemmaCheck:
    bad = np.flatnonzero(slack < -tol)
    violations = tuple(
        {
            "index": int(i),
            "slack": float(slack[i]),
            "sample": [np.asarray(p[i]).tolist() for p in payloads],
        }
        for i in bad[:10]
    )
    return LemmaCheck(
        name=name,
        m=m,
        kappa=float(kappa),
        samples=int(slack.size),
        min_slack=float(slack.min()),
        violations=violations,
    )


def lemma_suite(m_list, sample_count: int, seed: int, tol: float = 1e-12) -> LemmaSuiteReport:
    """Run every sampled inequality check; deterministic for a fixed seed.

    Violating samples are embedded in the report (as nested lists) so a
    failure can be replayed exactly.
    """
    if sample_count < 1:
        raise ValueError("sample_count must be >= 1")
    rng = np.random.default_rng(seed)
    checks = []
    for m in m_list:
        m = int(m)
        if m < 2:
            raise ValueError(f"matrix dimension must be >= 2, got {m}")
        k_mbp = mbp_kappa(m)
        k_energy = energy_kappa(m)

        v = sample_bounded_matrices(rng, m, sample_count)
        checks.append(_collect("norm-bound", m, k_mbp, check_norm_bound(v, k_mbp, m), tol, [v]))

        v1 = sample_bounded_matrices(rng, m, sample_count)
        v2 = sample_bounded_matrices(rng, m, sample_count)
        checks.append(
            _collect(
                "lipschitz-bound", m, k_mbp,
                check_lipschitz_bound(v1, v2, k_mbp, m), tol, [v1, v2],
            )
        )

        u1 = sample_bounded_matrices(rng, m, sample_count)
        u2 = sample_bounded_matrices(rng, m, sample_count)
        checks.append(
            _collect(
                "energy-inequality", m, k_energy,
                check_energy_inequality(u1, u2, k_energy), tol, [u1, u2],
            )
        )

    xs = np.concatenate([rng.uniform(-60.0, 60.0, sample_count), [0.0, -1e-8, 1e-8]])
    symbol = dissipation_symbol_check(xs, tol=tol)
    checks.append(
        LemmaCheck(
            name="dissipation-symbols",
            m=0,
            kappa=float("nan"),
            samples=xs.size,
            min_slack=min(symbol.min_y1, symbol.min_y2),
            violations=tuple({"x": v[0], "y1": v[1], "y2": v[2]} for v in symbol.violations),
        )
    )
    return LemmaSuiteReport(checks=tuple(checks), seed=seed, tol=tol)
