import numpy as np
import pytest
from scipy.spatial.distance import pdist

from secantproj import synth
from secantproj.exceptions import InvalidArgumentError
from secantproj.synth import DataSet


class TestTrigMomentCurve:
    def test_map_at_zero(self):
        np.testing.assert_array_equal(
            synth.trig_moment_map(0.0)[0], [1, 0, 1, 0, 1, 0, 1, 0, 1, 0]
        )

    def test_map_at_pi(self):
        np.testing.assert_allclose(
            synth.trig_moment_map(np.pi)[0],
            [-1, 0, 1, 0, -1, 0, 1, 0, -1, 0],
            atol=1e-14,
        )

    def test_shape_and_unit_circle(self):
        data = synth.trig_moment_curve(500, seed=3)
        assert (data.k, data.n) == (500, 10)
        x = data.points
        np.testing.assert_allclose(x[:, 0] ** 2 + x[:, 1] ** 2, 1.0, atol=1e-12)
        # every harmonic pair lies on the unit circle
        for h in range(5):
            np.testing.assert_allclose(x[:, 2 * h] ** 2 + x[:, 2 * h + 1] ** 2, 1.0, atol=1e-12)

    def test_count_too_small(self):
        with pytest.raises(InvalidArgumentError):
            synth.trig_moment_curve(1, seed=0)

    def test_deterministic(self):
        a = synth.trig_moment_curve(100, seed=9)
        b = synth.trig_moment_curve(100, seed=9)
        assert a.points.tobytes() == b.points.tobytes()
        c = synth.trig_moment_curve(100, seed=10)
        assert not np.array_equal(a.points, c.points)


class TestCurve3d:
    def test_map_at_zero(self):
        np.testing.assert_array_equal(synth.curve_map(0.0)[0], [1, 0, 1])

    def test_shape(self):
        data = synth.curve_3d(256, seed=1, target_dim=15)
        assert (data.k, data.n) == (256, 15)

    def test_embedding_preserves_distances(self):
        data = synth.curve_3d(64, seed=5, target_dim=15)
        rng = np.random.default_rng(5)
        t = rng.uniform(0.0, 2 * np.pi, 64)
        before = pdist(synth.curve_map(t))
        np.testing.assert_allclose(pdist(data.points), before, rtol=1e-10, atol=1e-12)

    def test_rejects_small_target(self):
        with pytest.raises(InvalidArgumentError):
            synth.curve_3d(10, seed=0, target_dim=2)


class TestTorus:
    def test_map_origin(self):
        np.testing.assert_allclose(synth.torus_map(0.0, 0.0, 2.0, 1.0)[0], [3, 0, 0])

    def test_torus_equation(self):
        rng = np.random.default_rng(0)
        theta, phi = rng.uniform(0, 2 * np.pi, (2, 1000))
        x, y, z = synth.torus_map(theta, phi, 2.0, 1.0).T
        np.testing.assert_allclose((np.hypot(x, y) - 2.0) ** 2 + z**2, 1.0, atol=1e-10)

    def test_shape(self):
        data = synth.torus(256, seed=2, target_dim=15)
        assert (data.k, data.n) == (256, 15)
        assert data.meta["R"] == 2.0 and data.meta["r"] == 1.0

    @pytest.mark.parametrize("R, r", [(1.0, 1.0), (1.0, 2.0)])
    def test_rejects_bad_radii(self, R, r):
        with pytest.raises(InvalidArgumentError):
            synth.torus(10, seed=0, R=R, r=r)

    def test_norms_of_embedded_points_match_torus(self):
        # distances from the origin survive the rotation, and the torus has
        # |x|^2 = R^2 + r^2 + 2 R r cos(phi) which spans [(R-r)^2, (R+r)^2]
        data = synth.torus(500, seed=4)
        sq = np.sum(data.points**2, axis=1)
        assert sq.min() >= 1.0 - 1e-10 and sq.max() <= 9.0 + 1e-10


class TestSphere3:
    def test_unit_norm_and_shape(self):
        data = synth.sphere3(256, seed=3, target_dim=15)
        assert (data.k, data.n) == (256, 15)
        np.testing.assert_allclose(np.linalg.norm(data.points, axis=1), 1.0, atol=1e-12)

    def test_mean_near_zero(self):
        count = 4000
        data = synth.sphere3(count, seed=11, target_dim=4)
        assert np.all(np.abs(data.points.mean(axis=0)) < 4 / np.sqrt(count))

    def test_rejects_small_target(self):
        with pytest.raises(InvalidArgumentError):
            synth.sphere3(10, seed=0, target_dim=3)


class TestEmbedIsometric:
    def test_same_dimension_rotation(self, rng):
        data = DataSet(rng.standard_normal((30, 5)))
        out = synth.embed_isometric(data, 5, seed=1)
        np.testing.assert_allclose(
            np.linalg.norm(out.points, axis=1), np.linalg.norm(data.points, axis=1), atol=1e-12
        )

    def test_distances_preserved(self, rng):
        data = DataSet(rng.standard_normal((40, 3)))
        out = synth.embed_isometric(data, 12, seed=2)
        np.testing.assert_allclose(pdist(out.points), pdist(data.points), rtol=1e-10)

    def test_rotation_is_orthogonal(self):
        Q = synth.random_orthogonal(15, seed=8)
        assert np.abs(Q.T @ Q - np.eye(15)).max() < 1e-10

    def test_rejects_shrinking(self, rng):
        with pytest.raises(InvalidArgumentError):
            synth.embed_isometric(DataSet(rng.standard_normal((5, 4))), 3, seed=0)


class TestNoise:
    def test_zero_sigma_identity(self):
        data = synth.trig_moment_curve(50, seed=0)
        out = synth.add_gaussian_noise(data, 0.0, seed=1)
        np.testing.assert_array_equal(out.points, data.points)

    def test_noise_statistics(self):
        data = synth.trig_moment_curve(12800, seed=0)
        noise = synth.add_gaussian_noise(data, 0.1, seed=1).points - data.points
        assert abs(noise.std() - 0.1) <= 0.005
        assert abs(noise.mean()) <= 0.01

    def test_negative_sigma(self):
        with pytest.raises(InvalidArgumentError):
            synth.add_gaussian_noise(synth.trig_moment_curve(5, seed=0), -1.0, seed=0)

    def test_deterministic(self):
        data = synth.trig_moment_curve(20, seed=0)
        a = synth.add_gaussian_noise(data, 0.1, seed=4)
        b = synth.add_gaussian_noise(data, 0.1, seed=4)
        assert a.points.tobytes() == b.points.tobytes()


def test_dataset_rejects_non_finite():
    with pytest.raises(InvalidArgumentError):
        DataSet(np.array([[0.0, np.nan], [1.0, 2.0]]))


def test_dataset_is_read_only():
    data = DataSet(np.zeros((3, 2)))
    with pytest.raises(ValueError):
        data.points[0, 0] = 1.0
