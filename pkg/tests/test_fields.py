import numpy as np
import pytest

from macetd.fields import GridSpec, determinant_field, discrete_energy, l2_field_norm, sup_frob_norm
from macetd.initial_conditions import rotation_2d

from oracles import brute_force_energy


class TestGridSpec:
    def test_spacing(self):
        grid = GridSpec(2, 64)
        assert grid.h == pytest.approx(1.0 / 64, abs=0.0)
        assert grid.shape == (64, 64)
        assert grid.num_cells == 64 * 64

    def test_cell_centers_symmetric(self):
        c = GridSpec(1, 8).cell_centers()
        # symmetric placement, no sample on the periodic seam
        assert np.allclose(c + c[::-1], 0.0)
        assert c[0] == pytest.approx(-0.5 + 0.5 / 8)

    def test_rejects_bad_dims(self):
        with pytest.raises(ValueError):
            GridSpec(4, 8)
        with pytest.raises(ValueError):
            GridSpec(2, 0)


class TestSupFrobNorm:
    def test_uniform_identity(self):
        u = np.tile(np.eye(2), (5, 5, 1, 1))
        assert sup_frob_norm(u) == pytest.approx(np.sqrt(2.0), abs=0.0)

    def test_single_hot_cell(self):
        u = np.zeros((4, 4, 2, 2))
        u[1, 2] = 2.0 * np.eye(2)
        assert sup_frob_norm(u) == pytest.approx(2.0 * np.sqrt(2.0))

    def test_rotation_field(self):
        grid = GridSpec(2, 16)
        x, y = grid.meshgrid()
        u = rotation_2d(1.0 + 0.5 * np.pi * np.sin(2.0 * np.pi * (x + y)))
        assert sup_frob_norm(u) == pytest.approx(np.sqrt(2.0), abs=1e-14)


class TestDiscreteEnergy:
    def test_uniform_orthogonal_is_zero(self):
        theta = 0.3
        c, s = np.cos(theta), np.sin(theta)
        u = np.tile(np.array([[c, -s], [s, c]]), (8, 8, 1, 1))
        assert abs(discrete_energy(u, 0.1)) <= 1e-14

    def test_uniform_zero_field(self):
        u = np.zeros((8, 8, 2, 2))
        assert discrete_energy(u, 0.5) == pytest.approx(0.5)

    def test_matches_brute_force_1d_variation(self):
        # 2x2 rotations with angle 2*pi*x, constant along y
        grid = GridSpec(2, 64)
        x, _ = grid.meshgrid()
        u = rotation_2d(2.0 * np.pi * x)
        ours = discrete_energy(u, 0.01)
        ref = brute_force_energy(u, 0.01)
        assert ours == pytest.approx(ref, rel=1e-12)

    def test_matches_brute_force_random_small(self):
        rng = np.random.default_rng(7)
        u = rng.standard_normal((5, 5, 2, 2))
        assert discrete_energy(u, 0.2) == pytest.approx(brute_force_energy(u, 0.2), rel=1e-12)

    def test_matches_brute_force_3d(self):
        rng = np.random.default_rng(9)
        u = rng.standard_normal((4, 4, 4, 3, 3))
        assert discrete_energy(u, 0.3) == pytest.approx(brute_force_energy(u, 0.3), rel=1e-12)

    def test_nonnegative_on_random_fields(self):
        rng = np.random.default_rng(11)
        for _ in range(10):
            u = rng.standard_normal((6, 6, 2, 2))
            assert discrete_energy(u, 0.1) >= 0.0


class TestFieldNorms:
    def test_l2_of_uniform_identity(self):
        u = np.tile(np.eye(2), (8, 8, 1, 1))
        # unit volume, per-cell norm sqrt(2)
        assert l2_field_norm(u) == pytest.approx(np.sqrt(2.0))

    def test_determinants(self):
        u = np.tile(np.eye(2), (4, 4, 1, 1))
        u[0, 0] = np.diag([1.0, -1.0])
        det = determinant_field(u)
        assert det.shape == (4, 4)
        assert det[0, 0] == pytest.approx(-1.0)
        assert det[1, 1] == pytest.approx(1.0)
