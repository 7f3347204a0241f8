import numpy as np
import pytest
from scipy.stats import kstest
from scipy.stats import qmc

from bcopy.sampling import (PointCloud, Region, map_to_region, region_points,
                            sobol_sequence, uniform_box, unit_ball_cloud)


class TestRegion:
    def test_rejects_inverted_bounds(self):
        with pytest.raises(ValueError):
            Region(np.array([0.0, 1.0]), np.array([1.0, 1.0]))

    def test_diameter(self):
        region = Region(np.array([0.0, 0.0]), np.array([3.0, 4.0]))
        assert region.diameter == 5.0

    def test_bounding_inflates(self):
        pts = np.array([[0.0, 0.0], [1.0, 2.0]])
        region = Region.bounding(pts, inflate=0.1)
        np.testing.assert_allclose(region.lower, [-0.1, -0.2])
        np.testing.assert_allclose(region.upper, [1.1, 2.2])


class TestSobol:
    def test_first_points_2d(self):
        cloud = sobol_sequence(2, 4, shift_seed=0)
        np.testing.assert_array_equal(
            cloud.points,
            [[0.0, 0.0], [0.5, 0.5], [0.75, 0.25], [0.25, 0.75]])

    def test_first_points_1d(self):
        np.testing.assert_array_equal(sobol_sequence(1, 2, 0).points, [[0.0], [0.5]])

    @pytest.mark.parametrize("dim", [1, 2, 3, 8, 21, 64])
    def test_matches_reference_generator(self, dim):
        ours = sobol_sequence(dim, 128, shift_seed=0).points
        ref = qmc.Sobol(d=dim, scramble=False).random(128)
        np.testing.assert_array_equal(ours, ref)

    @pytest.mark.parametrize("k", range(1, 9))
    def test_dyadic_stratification_1d(self, k):
        # first 2^k points hit every dyadic interval of size 2^-k once
        pts = sobol_sequence(1, 2 ** k, 0).points[:, 0]
        cells = np.floor(pts * 2 ** k).astype(int)
        assert sorted(cells) == list(range(2 ** k))

    def test_translation_stays_in_unit_box(self):
        for seed in (1, 2, 99):
            pts = sobol_sequence(3, 500, shift_seed=seed).points
            assert ((pts >= 0.0) & (pts < 1.0)).all()

    def test_shift_is_deterministic(self):
        a = sobol_sequence(4, 100, shift_seed=5).points
        b = sobol_sequence(4, 100, shift_seed=5).points
        np.testing.assert_array_equal(a, b)
        c = sobol_sequence(4, 100, shift_seed=6).points
        assert not np.array_equal(a, c)

    def test_dim_out_of_range(self):
        with pytest.raises(ValueError):
            sobol_sequence(65, 4)
        with pytest.raises(ValueError):
            sobol_sequence(0, 4)


class TestMapToRegion:
    def test_midpoint(self):
        cloud = PointCloud(np.array([[0.5, 0.5]]), "test")
        region = Region.cube(2)
        np.testing.assert_array_equal(map_to_region(cloud, region).points, [[0.0, 0.0]])

    def test_lower_corner(self):
        cloud = PointCloud(np.array([[0.0, 0.0]]), "test")
        region = Region(np.array([2.0, 0.0]), np.array([4.0, 10.0]))
        np.testing.assert_array_equal(map_to_region(cloud, region).points, [[2.0, 0.0]])

    def test_quarter(self):
        cloud = PointCloud(np.array([[0.25]]), "test")
        region = Region(np.array([0.0]), np.array([8.0]))
        np.testing.assert_array_equal(map_to_region(cloud, region).points, [[2.0]])

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            map_to_region(PointCloud(np.zeros((1, 3)), "t"), Region.cube(2))


class TestUnitBall:
    def test_norms_at_most_one(self):
        pts = unit_ball_cloud(5, 2000, seed=3).points
        assert (np.linalg.norm(pts, axis=1) <= 1.0).all()

    def test_radius_law_mean(self):
        # radius ~ U(0,1) in any dimension: mean norm 0.5
        for dim in (2, 7):
            pts = unit_ball_cloud(dim, 100_000, seed=11).points
            assert abs(np.linalg.norm(pts, axis=1).mean() - 0.5) < 0.01

    def test_radius_law_median(self):
        # distinguishes radius-uniform from volume-uniform (0.25 in 2-D)
        pts = unit_ball_cloud(2, 100_000, seed=12).points
        frac = (np.linalg.norm(pts, axis=1) <= 0.5).mean()
        assert abs(frac - 0.5) < 0.01

    def test_radius_kolmogorov_smirnov(self):
        norms = np.linalg.norm(unit_ball_cloud(3, 10_000, seed=13).points, axis=1)
        stat = kstest(norms, "uniform").statistic
        assert stat < 1.628 / np.sqrt(10_000)  # 1% critical value

    def test_deterministic(self):
        a = unit_ball_cloud(4, 50, seed=7).points
        b = unit_ball_cloud(4, 50, seed=7).points
        np.testing.assert_array_equal(a, b)


class TestUniformBox:
    def test_inside_region(self):
        region = Region(np.array([-2.0, 1.0]), np.array([-1.0, 5.0]))
        pts = uniform_box(region, 1000, seed=0).points
        assert region.contains(pts).all()

    def test_deterministic(self):
        region = Region.cube(3)
        np.testing.assert_array_equal(uniform_box(region, 100, 9).points,
                                      uniform_box(region, 100, 9).points)

    def test_mean_near_midpoint(self):
        region = Region(np.array([0.0, -4.0]), np.array([2.0, 0.0]))
        n = 40_000
        pts = uniform_box(region, n, seed=21).points
        sigma = (region.upper - region.lower) / np.sqrt(12.0)
        mid = (region.upper + region.lower) / 2.0
        assert (np.abs(pts.mean(axis=0) - mid) < 3.0 * sigma / np.sqrt(n)).all()


def test_region_points_modes():
    region = Region.cube(2)
    for mode in ("sobol", "uniform"):
        pts = region_points(region, 64, 5, mode=mode).points
        assert region.contains(pts).all()
    with pytest.raises(ValueError):
        region_points(region, 8, 1, mode="latin")


def test_point_cloud_csv_roundtrip(tmp_path):
    cloud = uniform_box(Region.cube(3), 25, seed=4)
    path = tmp_path / "cloud.csv"
    cloud.save_csv(path)
    loaded = PointCloud.load_csv(path)
    np.testing.assert_array_equal(cloud.points, loaded.points)
