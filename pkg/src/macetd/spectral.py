"""Fourier-side machinery: stencil symbol, phi functions, propagator tables.

The linear operator integrated exactly is L = kappa - eps^2 * Lap_h, where
Lap_h is the central second-difference Laplacian on the periodic grid. L is
diagonal in the discrete Fourier basis, so each mode carries three scalars:
e^{-tau l}, tau*phi1(-tau l) and tau*phi2(-tau l).
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import numpy as np
import scipy.fft as _fft

from .fields import GridSpec, check_field

__all__ = [
    "LaplacianSymbol",
    "PropagatorTables",
    "SymbolCheckReport",
    "laplacian_symbol",
    "phi1",
    "phi2",
    "build_propagator",
    "fft_forward",
    "fft_inverse",
    "dissipation_y1",
    "dissipation_y2",
    "dissipation_symbol_check",
    "fft_workers",
]

THREADS_ENV_VAR = "MAC_ETD_THREADS"

# Below this |z| the direct expm1 formulas lose digits to cancellation (the
# phi2 numerator is ~z^2/2); a degree-8 Taylor polynomial takes over. At the
# crossover both branches agree to ~1e-15 relative.
PHI_TAYLOR_THRESHOLD = 0.05

_PHI1_COEFFS = tuple(1.0 / math.factorial(k + 1) for k in range(9))
_PHI2_COEFFS = tuple(1.0 / math.factorial(k + 2) for k in range(9))
_Y2_COEFFS = (
    1.5,
    1.0 / 12.0,
    1.0 / 72.0,
    1.0 / 270.0,
    1.0 / 2592.0,
    -1.0 / 13608.0,
    -139.0 / 8164800.0,
    1.0 / 874800.0,
    59.0 / 117573120.0,
)


def fft_workers() -> int:
    """Worker count for FFT calls, from the MAC_ETD_THREADS variable."""
    raw = os.environ.get(THREADS_ENV_VAR)
    if raw is None:
        return 1
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"{THREADS_ENV_VAR} must be an integer >= 1, got {raw!r}")
    if value < 1:
        raise ValueError(f"{THREADS_ENV_VAR} must be an integer >= 1, got {value}")
    return value


def _horner(coeffs, z):
    acc = np.full_like(z, coeffs[-1])
    for c in coeffs[-2::-1]:
        acc = acc * z + c
    return acc


def _phi(z, coeffs, direct):
    z = np.asarray(z, dtype=float)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        out = np.where(np.abs(z) < PHI_TAYLOR_THRESHOLD, _horner(coeffs, z), direct(z))
    return float(out[0]) if scalar else out


def phi1(z):
    """(e^z - 1)/z with phi1(0) = 1, accurate on [-700, 0] and beyond."""
    return _phi(z, _PHI1_COEFFS, lambda z: np.expm1(z) / z)


def phi2(z):
    """(e^z - 1 - z)/z^2 with phi2(0) = 1/2, accurate on [-700, 0] and beyond."""
    return _phi(z, _PHI2_COEFFS, lambda z: (np.expm1(z) - z) / (z * z))


@dataclass(frozen=True)
class LaplacianSymbol:
    """Eigenvalues mu_k >= 0 of the negated central-difference Laplacian."""

    grid: GridSpec
    mu: np.ndarray


def laplacian_symbol(grid: GridSpec) -> LaplacianSymbol:
    """Per-mode symbol mu_k = sum_a (4/h^2) sin^2(pi k_a / n)."""
    k = np.arange(grid.n)
    per_axis = (4.0 * grid.n**2) * np.sin(np.pi * k / grid.n) ** 2
    mu = np.zeros(grid.shape)
    for axis in range(grid.d):
        shape = [1] * grid.d
        shape[axis] = grid.n
        mu = mu + per_axis.reshape(shape)
    return LaplacianSymbol(grid=grid, mu=mu)


@dataclass(frozen=True)
class PropagatorTables:
    """Per-mode update coefficients for a fixed (grid, kappa, epsilon, tau).

    ``a`` decays the linear part exactly, ``b`` weights the frozen
    nonlinearity, ``c`` weights the second-order correction:

        a = e^{-tau l},  b = (1 - e^{-tau l})/l,  c = (e^{-tau l} - 1 + tau l)/(tau l^2)

    with l = kappa + eps^2 * mu > 0 per mode.
    """

    grid: GridSpec
    kappa: float
    epsilon: float
    tau: float
    ell: np.ndarray
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray


def build_propagator(grid: GridSpec, kappa: float, epsilon: float, tau: float) -> PropagatorTables:
    if kappa <= 0.0:
        raise ValueError(f"kappa must be positive, got {kappa}")
    if epsilon <= 0.0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    if tau <= 0.0:
        raise ValueError(f"tau must be positive, got {tau}")
    mu = laplacian_symbol(grid).mu
    ell = kappa + epsilon**2 * mu
    z = -tau * ell
    return PropagatorTables(
        grid=grid,
        kappa=kappa,
        epsilon=epsilon,
        tau=tau,
        ell=ell,
        a=np.exp(z),
        b=tau * phi1(z),
        c=tau * phi2(z),
    )


def _spatial_axes(u: np.ndarray) -> tuple:
    return tuple(range(u.ndim - 2))


def fft_forward(u: np.ndarray, workers: int | None = None) -> np.ndarray:
    """Componentwise d-dimensional DFT over the grid axes."""
    u = check_field(u)
    return _fft.fftn(u, axes=_spatial_axes(u), workers=workers or fft_workers())


def fft_inverse(modes: np.ndarray, workers: int | None = None) -> np.ndarray:
    """Inverse of :func:`fft_forward`; the (roundoff) imaginary part is dropped."""
    modes = np.asarray(modes)
    out = _fft.ifftn(modes, axes=_spatial_axes(modes), workers=workers or fft_workers())
    return np.ascontiguousarray(out.real)


def dissipation_y1(x):
    """x - x/(1 - e^x), evaluated as -x/expm1(-x); y1(0) = 1. Non-negative."""
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        out = np.where(x == 0.0, 1.0, -x / np.expm1(-x))
    return float(out[0]) if scalar else out


def dissipation_y2(x):
    """x + x^2/(e^x - 1 - x) - y1(x)/2; y2(0) = 3/2. Non-negative."""
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        direct = x + x * x / (np.expm1(x) - x) - 0.5 * dissipation_y1(x)
        out = np.where(np.abs(x) < PHI_TAYLOR_THRESHOLD, _horner(_Y2_COEFFS, x), direct)
    return float(out[0]) if scalar else out


@dataclass(frozen=True)
class SymbolCheckReport:
    """Outcome of sampling the scalar dissipation symbols y1, y2."""

    passed: bool
    min_y1: float
    min_y2: float
    violations: tuple = field(default_factory=tuple)


def dissipation_symbol_check(samples, tol: float = 1e-12) -> SymbolCheckReport:
    """Verify y1(x) >= -tol and y2(x) >= -tol at every sample point.

    These scalars being non-negative makes the per-mode energy-difference
    operators of both schemes non-positive, which is what forces monotone
    energy decay for any step size.
    """
    xs = np.asarray(samples, dtype=float).ravel()
    if not np.all(np.isfinite(xs)):
        raise ValueError("sample points must be finite")
    v1 = dissipation_y1(xs)
    v2 = dissipation_y2(xs)
    bad = (v1 < -tol) | (v2 < -tol)
    violations = tuple(
        (float(x), float(a), float(b)) for x, a, b in zip(xs[bad], v1[bad], v2[bad])
    )
    return SymbolCheckReport(
        passed=not violations,
        min_y1=float(v1.min()) if xs.size else math.inf,
        min_y2=float(v2.min()) if xs.size else math.inf,
        violations=violations,
    )
