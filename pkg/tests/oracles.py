"""Independent reference computations used by the tests.

Everything here is deliberately written the slow, obvious way (python
loops, series summation, extended precision) so that it shares no code
path with the library being checked.
"""

import math

import mpmath
import numpy as np

mpmath.mp.dps = 60


def exact_scalar_solution(u0: float, t: float) -> float:
    """Closed form for du/dt = u - u^3 (the one-cell diagonal reduction)."""
    return u0 / math.sqrt(u0**2 + (1.0 - u0**2) * math.exp(-2.0 * t))


def mp_phi1(z: float) -> float:
    z = mpmath.mpf(z)
    if z == 0:
        return 1.0
    return float(mpmath.expm1(z) / z)


def mp_phi2(z: float) -> float:
    z = mpmath.mpf(z)
    if z == 0:
        return 0.5
    return float((mpmath.expm1(z) - z) / z**2)


def mp_y1(x: float) -> float:
    # x - x/(1 - e^x) rewritten cancellation-free as x e^x / (e^x - 1)
    x = mpmath.mpf(x)
    if x == 0:
        return 1.0
    return float(x * mpmath.exp(x) / mpmath.expm1(x))


def mp_y2(x: float) -> float:
    x = mpmath.mpf(x)
    if x == 0:
        return 1.5
    return float(x + x**2 / (mpmath.expm1(x) - x) - mp_y1(x) / 2)


def dense_laplacian_1d(n: int) -> np.ndarray:
    """Periodic central second-difference matrix on n cells of width 1/n."""
    h = 1.0 / n
    a = np.zeros((n, n))
    for i in range(n):
        a[i, i] = -2.0 / h**2
        a[i, (i + 1) % n] += 1.0 / h**2
        a[i, (i - 1) % n] += 1.0 / h**2
    return a


def series_expm(a: np.ndarray) -> np.ndarray:
    """Brute-force matrix exponential: scale by 2^-j, sum the Taylor series
    until terms vanish, then square j times."""
    a = np.asarray(a, dtype=float)
    norm = np.abs(a).sum(axis=1).max()
    j = max(0, int(math.ceil(math.log2(max(norm, 1e-300)))) + 1)
    b = a / 2.0**j
    result = np.eye(a.shape[0])
    term = np.eye(a.shape[0])
    for k in range(1, 200):
        term = term @ b / k
        result = result + term
        if np.abs(term).max() < 1e-20 * np.abs(result).max():
            break
    for _ in range(j):
        result = result @ result
    return result


def brute_force_energy(u: np.ndarray, epsilon: float) -> float:
    """Cell-by-cell python-loop evaluation of the discrete energy."""
    d = u.ndim - 2
    n = u.shape[0]
    m = u.shape[-1]
    h = 1.0 / n
    eye = np.eye(m)
    total = 0.0
    for idx in np.ndindex(*u.shape[:d]):
        cell = u[idx]
        grad = 0.0
        for axis in range(d):
            nbr = list(idx)
            nbr[axis] = (nbr[axis] + 1) % n
            diff = (u[tuple(nbr)] - cell) / h
            grad += float(np.sum(diff * diff))
        gram = cell.T @ cell - eye
        pot = 0.25 * float(np.sum(gram * gram))
        total += 0.5 * epsilon**2 * grad + pot
    return h**d * total


def stencil_mode_eigenvalue(d: int, n: int, k: tuple) -> float:
    """Eigenvalue of the negated stencil extracted by applying it to the
    complex exponential mode exp(2 pi i k.x / n) on the grid."""
    h = 1.0 / n
    axes = [np.arange(n) for _ in range(d)]
    mesh = np.meshgrid(*axes, indexing="ij")
    phase = sum(2.0j * np.pi * k[a] * mesh[a] / n for a in range(d))
    mode = np.exp(phase)
    lap = np.zeros_like(mode)
    for axis in range(d):
        lap += (np.roll(mode, -1, axis=axis) - 2.0 * mode + np.roll(mode, 1, axis=axis)) / h**2
    ratio = -lap / mode
    assert np.allclose(ratio.imag, 0.0, atol=1e-9)
    values = ratio.real
    assert values.max() - values.min() < 1e-6 * max(1.0, abs(values.max()))
    return float(values.mean())
