"""Pointwise algebra for fields of small square matrices.

Every operation broadcasts over leading axes, so the same code handles a
single m-by-m matrix and a whole grid of them (shape ``(..., m, m)``).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

__all__ = [
    "SvdTriple",
    "SvdConvergenceError",
    "DegenerateProjectionError",
    "frob_norm",
    "frob_inner",
    "nonlinear_term",
    "stabilized_nonlinear_term",
    "potential_trace",
    "svd_small",
    "project_orthogonal",
]

# One-sided Jacobi parameters: relative off-diagonal threshold and sweep cap.
JACOBI_TOL = 1e-14
JACOBI_SWEEP_CAP = 100

MAX_SVD_DIM = 8


class SvdConvergenceError(RuntimeError):
    """Jacobi sweeps exhausted before the columns became orthogonal."""


class DegenerateProjectionError(ValueError):
    """Orthogonal projection requested for a (near-)singular matrix."""


def frob_norm(a: np.ndarray):
    """Frobenius norm per matrix; a scalar for a single matrix."""
    a = np.asarray(a, dtype=float)
    return np.sqrt(np.einsum("...ij,...ij->...", a, a))


def frob_inner(a: np.ndarray, b: np.ndarray):
    """Frobenius inner product sum_ij a_ij * b_ij, per matrix."""
    return np.einsum("...ij,...ij->...", np.asarray(a, float), np.asarray(b, float))


def stabilized_nonlinear_term(u: np.ndarray, kappa: float, out=None) -> np.ndarray:
    """kappa*U + U - U U^T U evaluated pointwise.

    Written as explicit loops over the m^2 entries: for the small m used
    here this beats batched matmul by a wide margin on large grids, and an
    ``out`` buffer can be reused by the stepping hot loop.
    """
    u = np.asarray(u, dtype=float)
    m = u.shape[-1]
    if u.shape[-2] != m:
        raise ValueError(f"expected square matrices, got shape {u.shape}")
    if out is None:
        out = np.empty_like(u)
    elif out is u:
        raise ValueError("out buffer must not alias the input")
    gram = np.empty(u.shape[:-2] + (m, m))
    for i in range(m):
        for k in range(i, m):
            acc = u[..., i, 0] * u[..., k, 0]
            for j in range(1, m):
                acc += u[..., i, j] * u[..., k, j]
            gram[..., i, k] = acc
            if k != i:
                gram[..., k, i] = acc
    for i in range(m):
        for k in range(m):
            acc = gram[..., i, 0] * u[..., 0, k]
            for j in range(1, m):
                acc += gram[..., i, j] * u[..., j, k]
            np.multiply(u[..., i, k], kappa + 1.0, out=out[..., i, k])
            out[..., i, k] -= acc
    return out


def nonlinear_term(u: np.ndarray) -> np.ndarray:
    """U - U U^T U, the force of the quartic orthogonality potential."""
    return stabilized_nonlinear_term(u, 0.0)


def potential_trace(u: np.ndarray):
    """Quartic well depth 0.25 * ||U^T U - I||_F^2, per matrix."""
    u = np.asarray(u, dtype=float)
    m = u.shape[-1]
    gram = np.einsum("...ji,...jk->...ik", u, u)
    gram[..., range(m), range(m)] -= 1.0
    return 0.25 * np.einsum("...ij,...ij->...", gram, gram)


@dataclass(frozen=True)
class SvdTriple:
    """Decomposition a = p @ diag(sigma) @ q with orthogonal p, q.

    ``q`` is row-acting (already transposed), ``sigma`` is non-negative and
    non-increasing. Leading axes of the input are preserved.
    """

    p: np.ndarray
    sigma: np.ndarray
    q: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.p * self.sigma[..., None, :]) @ self.q


def svd_small(a: np.ndarray) -> SvdTriple:
    """One-sided Jacobi SVD for matrices up to 8x8, batched over leading axes.

    Deterministic: fixed cyclic pair ordering and a fixed convergence
    threshold on the relative off-diagonal mass. Raises
    :class:`SvdConvergenceError` if the sweep cap is exhausted.
    """
    a = np.asarray(a, dtype=float)
    m = a.shape[-1]
    if a.ndim < 2 or a.shape[-2] != m:
        raise ValueError(f"expected square matrices, got shape {a.shape}")
    if m > MAX_SVD_DIM:
        raise ValueError(f"sized for small matrices (m <= {MAX_SVD_DIM}), got m={m}")
    batch_shape = a.shape[:-2]
    w = a.reshape(-1, m, m).copy()
    nbatch = w.shape[0]
    v = np.tile(np.eye(m), (nbatch, 1, 1))
    pairs = list(combinations(range(m), 2))

    # Sweep until a full pass applies no rotation (all pairs within tolerance).
    converged = m < 2
    for _ in range(JACOBI_SWEEP_CAP):
        if converged:
            break
        rotated = False
        for p_i, q_i in pairs:
            wp = w[:, :, p_i]
            wq = w[:, :, q_i]
            alpha = np.einsum("bi,bi->b", wp, wp)
            beta = np.einsum("bi,bi->b", wq, wq)
            gamma = np.einsum("bi,bi->b", wp, wq)
            scale = np.sqrt(alpha * beta)
            need = np.abs(gamma) > JACOBI_TOL * scale
            if not need.any():
                continue
            rotated = True
            with np.errstate(divide="ignore", invalid="ignore"):
                zeta = (beta - alpha) / (2.0 * gamma)
                sign = np.where(zeta >= 0.0, 1.0, -1.0)
                t = sign / (np.abs(zeta) + np.sqrt(1.0 + zeta * zeta))
            t = np.where(need, t, 0.0)
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = c * t
            wp_new = c[:, None] * wp - s[:, None] * wq
            wq_new = s[:, None] * wp + c[:, None] * wq
            w[:, :, p_i] = wp_new
            w[:, :, q_i] = wq_new
            vp = v[:, :, p_i]
            vq = v[:, :, q_i]
            vp_new = c[:, None] * vp - s[:, None] * vq
            vq_new = s[:, None] * vp + c[:, None] * vq
            v[:, :, p_i] = vp_new
            v[:, :, q_i] = vq_new
        converged = not rotated
    if not converged:
        raise SvdConvergenceError(
            f"Jacobi SVD did not converge in {JACOBI_SWEEP_CAP} sweeps "
            f"for input of shape {a.shape}"
        )

    sigma = np.sqrt(np.einsum("bij,bij->bj", w, w))
    order = np.argsort(-sigma, axis=1, kind="stable")
    sigma = np.take_along_axis(sigma, order, axis=1)
    w = np.take_along_axis(w, order[:, None, :], axis=2)
    v = np.take_along_axis(v, order[:, None, :], axis=2)

    # Normalize columns; complete an orthonormal basis where sigma vanishes.
    tiny = np.finfo(float).tiny
    p = w / np.maximum(sigma[:, None, :], tiny)
    scale = np.max(sigma, axis=1)
    deficient = sigma <= 1e-15 * np.maximum(scale, 1.0)[:, None]
    if deficient.any():
        for b in np.nonzero(deficient.any(axis=1))[0]:
            _complete_basis(p[b], np.nonzero(deficient[b])[0])

    q = np.swapaxes(v, -1, -2)
    return SvdTriple(
        p=p.reshape(batch_shape + (m, m)),
        sigma=sigma.reshape(batch_shape + (m,)),
        q=q.reshape(batch_shape + (m, m)),
    )


def _complete_basis(p: np.ndarray, cols) -> None:
    """Fill the listed columns of p with unit vectors orthogonal to the rest."""
    m = p.shape[0]
    good = [j for j in range(m) if j not in set(cols)]
    basis = [p[:, j] for j in good]
    for j in cols:
        for e in np.eye(m):
            cand = e.copy()
            for b in basis:
                cand -= (cand @ b) * b
            norm = np.linalg.norm(cand)
            if norm > 0.5:
                cand /= norm
                p[:, j] = cand
                basis.append(cand)
                break
        else:  # pragma: no cover - m candidate vectors always suffice
            raise SvdConvergenceError("failed to complete orthonormal basis")


def project_orthogonal(a: np.ndarray) -> np.ndarray:
    """Frobenius-nearest orthogonal matrix, pointwise: replace A = P S Q by P Q.

    Raises :class:`DegenerateProjectionError` when the smallest singular
    value drops below 1e-12 times the Frobenius norm of the input (the
    nearest orthogonal matrix is then ill-defined).
    """
    triple = svd_small(a)
    smallest = np.atleast_1d(triple.sigma[..., -1])
    bad = smallest <= 1e-12 * np.atleast_1d(frob_norm(a))
    if bad.any():
        flat = int(np.flatnonzero(bad)[0])
        raise DegenerateProjectionError(
            f"(near-)singular matrix at flat index {flat}: "
            f"smallest singular value {smallest.ravel()[flat]:.3e}"
        )
    return triple.p @ triple.q
