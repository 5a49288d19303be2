import numpy as np
import pytest

from macetd.matrices import (
    DegenerateProjectionError,
    frob_inner,
    frob_norm,
    nonlinear_term,
    potential_trace,
    project_orthogonal,
    stabilized_nonlinear_term,
    svd_small,
)


def rotation(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def random_orthogonal(rng, m):
    q, r = np.linalg.qr(rng.standard_normal((m, m)))
    return q * np.sign(np.diag(r))


class TestFrobNorm:
    def test_identity(self):
        assert frob_norm(np.eye(2)) == pytest.approx(np.sqrt(2.0), abs=0.0)

    def test_three_four_five(self):
        assert frob_norm(np.array([[3.0, 4.0], [0.0, 0.0]])) == pytest.approx(5.0, abs=0.0)

    def test_zero(self):
        assert frob_norm(np.zeros((3, 3))) == 0.0

    def test_batched(self):
        a = np.stack([np.eye(2), 2.0 * np.eye(2)])
        assert np.allclose(frob_norm(a), [np.sqrt(2.0), 2.0 * np.sqrt(2.0)])

    def test_inner_product(self):
        a = np.array([[1.0, 2.0], [3.0, 4.0]])
        assert frob_inner(a, a) == pytest.approx(frob_norm(a) ** 2)


class TestNonlinearTerm:
    def test_identity_is_zero(self):
        assert np.allclose(nonlinear_term(np.eye(2)), 0.0, atol=0.0)

    def test_zero_is_zero(self):
        assert np.allclose(nonlinear_term(np.zeros((2, 2))), 0.0, atol=0.0)

    def test_double_identity(self):
        assert np.allclose(nonlinear_term(2.0 * np.eye(2)), -6.0 * np.eye(2))

    def test_orthogonal_is_zero(self):
        rng = np.random.default_rng(3)
        for m in (2, 3, 4):
            q = random_orthogonal(rng, m)
            assert np.abs(nonlinear_term(q)).max() < 1e-14

    def test_matches_matmul(self):
        rng = np.random.default_rng(5)
        u = rng.standard_normal((7, 3, 3))
        expected = u - u @ np.swapaxes(u, -1, -2) @ u
        assert np.allclose(nonlinear_term(u), expected, atol=1e-14)

    def test_out_must_not_alias(self):
        u = np.eye(2)
        with pytest.raises(ValueError):
            stabilized_nonlinear_term(u, 1.0, out=u)


class TestStabilizedTerm:
    def test_identity(self):
        out = stabilized_nonlinear_term(np.eye(2), 5.0)
        assert np.allclose(out, 5.0 * np.eye(2), atol=0.0)
        assert frob_norm(out) == pytest.approx(5.0 * np.sqrt(2.0))

    def test_orthogonal_scales(self):
        rng = np.random.default_rng(11)
        kappa = 3.5
        q = random_orthogonal(rng, 3)
        assert np.allclose(stabilized_nonlinear_term(q, kappa), kappa * q, atol=1e-14)

    @pytest.mark.parametrize("m", [2, 3, 4])
    def test_norm_bound_sampled(self, m):
        # ||kappa V + f(V)|| <= kappa sqrt(m) on the ball ||V|| <= sqrt(m)
        rng = np.random.default_rng(29)
        kappa = max(1.5 * m - 1.0, 2.0)
        g = rng.standard_normal((2000, m, m))
        radii = np.sqrt(m) * rng.random(2000)
        v = g * (radii / frob_norm(g))[:, None, None]
        norms = frob_norm(stabilized_nonlinear_term(v, kappa))
        assert norms.max() <= kappa * np.sqrt(m) + 1e-12

    def test_singular_value_identity(self):
        # ||kappa V + f(V)||^2 == sum ((kappa+1) s - s^3)^2 over singular values
        rng = np.random.default_rng(31)
        kappa = 4.0
        for m in (2, 3):
            v = rng.standard_normal((m, m))
            sigma = svd_small(v).sigma
            lhs = frob_norm(stabilized_nonlinear_term(v, kappa)) ** 2
            rhs = np.sum(((kappa + 1.0) * sigma - sigma**3) ** 2)
            assert lhs == pytest.approx(rhs, rel=1e-10)

    @pytest.mark.parametrize("m", [2, 3])
    def test_lipschitz_sampled(self, m):
        rng = np.random.default_rng(37)
        kappa = max(1.5 * m - 1.0, 2.0)
        bound = kappa + 1.0 + 5.0 * m
        g1 = rng.standard_normal((1000, m, m))
        g2 = rng.standard_normal((1000, m, m))
        v1 = g1 * (np.sqrt(m) * rng.random(1000) / frob_norm(g1))[:, None, None]
        v2 = g2 * (np.sqrt(m) * rng.random(1000) / frob_norm(g2))[:, None, None]
        lhs = frob_norm(stabilized_nonlinear_term(v1, kappa) - stabilized_nonlinear_term(v2, kappa))
        rhs = bound * frob_norm(v1 - v2)
        assert (lhs <= rhs + 1e-12).all()


class TestPotentialTrace:
    def test_orthogonal_is_minimum(self):
        rng = np.random.default_rng(13)
        q = random_orthogonal(rng, 3)
        assert potential_trace(q) == pytest.approx(0.0, abs=1e-28)

    def test_zero_matrix(self):
        assert potential_trace(np.zeros((2, 2))) == pytest.approx(0.5)

    def test_double_identity(self):
        assert potential_trace(2.0 * np.eye(2)) == pytest.approx(4.5)


class TestSvdSmall:
    def test_identity(self):
        t = svd_small(np.eye(2))
        assert np.allclose(t.sigma, 1.0)
        assert np.allclose(t.reconstruct(), np.eye(2), atol=1e-15)

    def test_diagonal(self):
        t = svd_small(np.diag([2.0, 0.5]))
        assert np.allclose(t.sigma, [2.0, 0.5])

    def test_sigma_sorted_and_nonnegative(self):
        rng = np.random.default_rng(17)
        t = svd_small(rng.standard_normal((50, 4, 4)))
        assert (t.sigma >= 0.0).all()
        assert (np.diff(t.sigma, axis=-1) <= 0.0).all()

    @pytest.mark.parametrize("m", [2, 3])
    def test_reconstruction_and_orthogonality(self, m):
        rng = np.random.default_rng(19)
        a = rng.standard_normal((200, m, m))
        t = svd_small(a)
        recon = t.reconstruct()
        scale = np.maximum(1.0, frob_norm(a))
        assert (frob_norm(recon - a) <= 1e-12 * scale).all()
        eye = np.eye(m)
        assert (frob_norm(np.swapaxes(t.p, -1, -2) @ t.p - eye) <= 1e-12).all()
        assert (frob_norm(t.q @ np.swapaxes(t.q, -1, -2) - eye) <= 1e-12).all()

    def test_matches_lapack_singular_values(self):
        rng = np.random.default_rng(23)
        a = rng.standard_normal((20, 3, 3))
        ours = svd_small(a).sigma
        lapack = np.linalg.svd(a, compute_uv=False)
        assert np.allclose(ours, lapack, rtol=1e-12, atol=1e-12)

    def test_deterministic(self):
        rng = np.random.default_rng(27)
        a = rng.standard_normal((3, 3))
        t1, t2 = svd_small(a), svd_small(a)
        assert (t1.p == t2.p).all() and (t1.sigma == t2.sigma).all() and (t1.q == t2.q).all()

    def test_zero_matrix(self):
        t = svd_small(np.zeros((3, 3)))
        assert np.allclose(t.sigma, 0.0)
        assert np.allclose(t.p @ np.swapaxes(t.p, -1, -2), np.eye(3), atol=1e-14)

    def test_rank_deficient(self):
        a = np.array([[1.0, 2.0, 0.0], [2.0, 4.0, 0.0], [0.0, 0.0, 0.0]])
        t = svd_small(a)
        assert np.allclose(t.reconstruct(), a, atol=1e-13)
        assert np.allclose(np.swapaxes(t.p, -1, -2) @ t.p, np.eye(3), atol=1e-12)

    def test_too_large_rejected(self):
        with pytest.raises(ValueError):
            svd_small(np.eye(9))


class TestProjectOrthogonal:
    def test_orthogonal_fixed_point(self):
        rng = np.random.default_rng(41)
        q = random_orthogonal(rng, 3)
        assert np.allclose(project_orthogonal(q), q, atol=1e-12)

    def test_diagonal_snaps_to_identity(self):
        assert np.allclose(project_orthogonal(np.diag([2.0, 0.5])), np.eye(2), atol=1e-14)

    def test_rotation_times_diagonal(self):
        r = rotation(0.7)
        assert np.allclose(project_orthogonal(r @ np.diag([3.0, 2.0])), r, atol=1e-13)

    def test_output_orthogonal(self):
        rng = np.random.default_rng(43)
        a = rng.standard_normal((100, 3, 3))
        p = project_orthogonal(a)
        gram = np.swapaxes(p, -1, -2) @ p
        assert (frob_norm(gram - np.eye(3)) <= 1e-10).all()

    def test_idempotent(self):
        rng = np.random.default_rng(47)
        a = rng.standard_normal((50, 2, 2))
        once = project_orthogonal(a)
        twice = project_orthogonal(once)
        assert np.abs(twice - once).max() <= 1e-10

    def test_degenerate_rejected(self):
        with pytest.raises(DegenerateProjectionError):
            project_orthogonal(np.array([[1.0, 0.0], [0.0, 0.0]]))

    def test_zero_rejected(self):
        with pytest.raises(DegenerateProjectionError):
            project_orthogonal(np.zeros((2, 2)))
