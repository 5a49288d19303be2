"""Periodic uniform grids and norms/energies of matrix-valued fields.

A matrix field is a plain ndarray of shape ``grid.shape + (m, m)``: the
first ``d`` axes are the lattice, the trailing two hold the per-cell
matrix. The domain is the unit torus [-1/2, 1/2)^d sampled at cell centers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .matrices import frob_norm, potential_trace

__all__ = [
    "GridSpec",
    "sup_frob_norm",
    "discrete_energy",
    "l2_field_norm",
    "determinant_field",
]


@dataclass(frozen=True)
class GridSpec:
    """Uniform periodic grid: n cells per axis on [-1/2, 1/2)^d."""

    d: int
    n: int

    def __post_init__(self):
        if self.d not in (1, 2, 3):
            raise ValueError(f"spatial dimension must be 1, 2 or 3, got {self.d}")
        if self.n < 1:
            raise ValueError(f"need at least one cell per axis, got n={self.n}")

    @property
    def h(self) -> float:
        return 1.0 / self.n

    @property
    def shape(self) -> tuple:
        return (self.n,) * self.d

    @property
    def num_cells(self) -> int:
        return self.n**self.d

    def cell_centers(self) -> np.ndarray:
        """1-d coordinate array x_i = -1/2 + (i + 1/2) h."""
        return -0.5 + (np.arange(self.n) + 0.5) * self.h

    def meshgrid(self):
        """Per-axis coordinate arrays of shape ``self.shape``."""
        c = self.cell_centers()
        return np.meshgrid(*([c] * self.d), indexing="ij")


def field_shape(grid: GridSpec, m: int) -> tuple:
    return grid.shape + (m, m)


def check_field(u: np.ndarray, grid: GridSpec | None = None) -> np.ndarray:
    """Validate the shape convention and return the array as float64."""
    u = np.asarray(u, dtype=float)
    if u.ndim < 3 or u.shape[-1] != u.shape[-2]:
        raise ValueError(f"not a matrix field: shape {u.shape}")
    if grid is not None and u.shape[: grid.d] != grid.shape:
        raise ValueError(f"field shape {u.shape} does not match grid {grid.shape}")
    return u


def sup_frob_norm(u: np.ndarray) -> float:
    """Largest per-cell Frobenius norm over the grid."""
    return float(np.max(frob_norm(u)))


def discrete_energy(u: np.ndarray, epsilon: float) -> float:
    """Quadrature of (eps^2/2)*||grad U||_F^2 + 0.25*||U^T U - I||_F^2.

    The gradient is the forward difference quotient with periodic wrap,
    which pairs with the central second-difference Laplacian under
    summation by parts. Cell volume h^d weights the sum; h is inferred
    from the field shape (uniform unit torus).
    """
    u = check_field(u)
    d = u.ndim - 2
    n = u.shape[0]
    h = 1.0 / n
    grad_sq = 0.0
    for axis in range(d):
        diff = (np.roll(u, -1, axis=axis) - u) / h
        grad_sq += np.sum(diff * diff)
    pot = np.sum(potential_trace(u))
    return float(h**d * (0.5 * epsilon**2 * grad_sq + pot))


def l2_field_norm(u: np.ndarray) -> float:
    """Grid L^2 norm (h^d sum of squared Frobenius norms)^(1/2)."""
    u = check_field(u)
    d = u.ndim - 2
    h = 1.0 / u.shape[0]
    return float(np.sqrt(h**d * np.sum(u * u)))


def determinant_field(u: np.ndarray) -> np.ndarray:
    """Per-cell determinant, shape ``grid.shape``."""
    return np.linalg.det(check_field(u))
