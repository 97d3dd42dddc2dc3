import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_basis, random_unit_columns
from secantproj import synth
from secantproj.analysis import (
    DimensionCurve,
    bilipschitz_constants,
    compare_projections,
    derive_seeds,
    estimate_dimension,
    naive_projection,
    repeated_sample_sweep,
    sweep,
)
from secantproj.exceptions import InvalidArgumentError
from secantproj.sap import ProjectionBasis, SapConfig, init_pca, min_projected_secant
from secantproj.secants import SecantSet, compute_secants, subsample


class TestBiLipschitz:
    def test_full_dimension(self, rng):
        S = SecantSet.from_vectors(random_unit_columns(rng, 3, 20))
        b = bilipschitz_constants(ProjectionBasis(np.eye(3)), S)
        assert b.m1 == pytest.approx(1.0, abs=1e-12)
        assert b.m2 == pytest.approx(1.0, abs=1e-12)

    def test_collapsed_secant(self):
        S = SecantSet.from_vectors(np.array([[0.0], [1.0]]))
        b = bilipschitz_constants(ProjectionBasis(np.eye(2, 1)), S)
        assert (b.m1, b.m2) == (0.0, 0.0)
        assert b.inverse_m2 == math.inf and b.inverse_m1 == math.inf
        assert not b.injective

    def test_m1_matches_sap_scan_exactly(self, rng):
        S = SecantSet.from_vectors(random_unit_columns(rng, 6, 500))
        basis = random_basis(rng, 6, 3)
        b = bilipschitz_constants(basis, S)
        assert b.m1 == min_projected_secant(basis, S)[1]
        assert b.inverse_m2 == 1.0 / b.m1 and b.inverse_m1 == 1.0 / b.m2

    @settings(max_examples=50, deadline=None)
    @given(st.integers(1, 8), st.data(), st.integers(0, 2**31))
    def test_upper_bound_automatic(self, n, data, seed):
        m = data.draw(st.integers(1, n))
        rng = np.random.default_rng(seed)
        S = SecantSet.from_vectors(random_unit_columns(rng, n, 30))
        b = bilipschitz_constants(random_basis(rng, n, m), S)
        assert 0.0 <= b.m1 <= b.m2 <= 1.0 + 1e-10


class TestNaive:
    def test_identity(self):
        np.testing.assert_array_equal(naive_projection(3, 3).columns, np.eye(3))

    def test_first_three_axes(self):
        P = naive_projection(10, 3).columns
        np.testing.assert_array_equal(P, np.eye(10, 3))
        assert np.array_equal(P.T @ P, np.eye(3))

    def test_too_many(self):
        with pytest.raises(InvalidArgumentError):
            naive_projection(2, 3)


class TestCompare:
    def test_full_dimension_all_one(self):
        data = synth.trig_moment_curve(40, seed=0)
        c = compare_projections(data, 10, SapConfig(10, iterations=5))
        for value in (c.naive, c.pca, c.sap):
            assert value == pytest.approx(1.0, abs=1e-12)

    def test_best_dominates_pca(self):
        data = synth.trig_moment_curve(200, seed=1)
        c = compare_projections(data, 3, SapConfig(3, iterations=40, return_best=True))
        assert c.sap >= c.pca
        assert c.result.history[0].min_norm == c.pca

    def test_pca_is_secant_pca(self):
        data = synth.trig_moment_curve(120, seed=2)
        secants = compute_secants(data)
        c = compare_projections(data, 3, SapConfig(3, iterations=0), secants=secants)
        assert c.pca == min_projected_secant(init_pca(secants, 3), secants)[1]


class TestSweep:
    def test_full_dimension_only(self):
        data = synth.sphere3(40, seed=0, target_dim=5)
        curve = sweep(data, [5], SapConfig(1, iterations=3))
        assert curve.dims == (5,)
        assert curve.min_norms[0] == pytest.approx(1.0, abs=1e-12)

    def test_init_norms_non_decreasing(self):
        data = synth.trig_moment_curve(120, seed=3)
        curve = sweep(data, range(1, 11), SapConfig(1, iterations=0))
        init = np.array(curve.init_norms)
        assert np.all(np.diff(init) >= -1e-12)
        assert curve.init_norms == curve.min_norms

    def test_threshold_never_lowers_minimum_at_fixed_basis(self, rng):
        data = synth.add_gaussian_noise(synth.trig_moment_curve(150, seed=0), 0.1, seed=1)
        full = compute_secants(data)
        kept = compute_secants(data, threshold=2.0)
        for m in (3, 4, 5, 6):
            basis = init_pca(full, m)
            assert min_projected_secant(basis, kept)[1] >= min_projected_secant(basis, full)[1]

    def test_meta(self):
        data = synth.trig_moment_curve(60, seed=0)
        curve = sweep(data, [2, 3], SapConfig(1, iterations=2, alpha=0.05), threshold=0.5)
        assert curve.meta["iterations"] == 2 and curve.meta["alpha"] == 0.05
        assert curve.meta["threshold"] == 0.5 and curve.meta["points"] == 60

    def test_rejects_large_dim(self):
        with pytest.raises(InvalidArgumentError):
            sweep(synth.trig_moment_curve(20, seed=0), [11])

    def test_rejects_empty(self):
        with pytest.raises(InvalidArgumentError):
            sweep(synth.trig_moment_curve(20, seed=0), [])


class TestRepeatedSweep:
    def test_single_run_is_subsample_plus_sweep(self):
        data = synth.trig_moment_curve(300, seed=0)
        config = SapConfig(1, iterations=5)
        rep = repeated_sample_sweep(data, 60, 1, [2, 3, 4], config, seed=7)
        direct = sweep(subsample(data, 60, rep.seeds[0]), [2, 3, 4], config)
        assert rep.curves[0].min_norms == direct.min_norms

    def test_deterministic_and_summarized(self):
        data = synth.trig_moment_curve(300, seed=0)
        config = SapConfig(1, iterations=3)
        a = repeated_sample_sweep(data, 40, 3, [1, 2, 3], config, seed=1)
        b = repeated_sample_sweep(data, 40, 3, [1, 2, 3], config, seed=1)
        assert [c.min_norms for c in a.curves] == [c.min_norms for c in b.curves]
        table = np.array([c.min_norms for c in a.curves])
        np.testing.assert_allclose(a.mean, table.mean(axis=0))
        np.testing.assert_allclose(a.spread, table.std(axis=0))
        assert len(set(a.seeds)) == 3

    def test_sample_too_large(self):
        with pytest.raises(InvalidArgumentError):
            repeated_sample_sweep(synth.trig_moment_curve(30, seed=0), 31, 2, [1])


def test_derive_seeds_stable():
    assert derive_seeds(5, 4) == derive_seeds(5, 4)
    assert derive_seeds(5, 4)[:2] == derive_seeds(5, 2)


def _curve(values, start=1):
    return DimensionCurve(range(start, start + len(values)), values)


class TestEstimateDimension:
    def test_curve_like(self):
        est = estimate_dimension(_curve([0.001, 0.03, 0.25, 0.4, 0.6]))
        assert (est.embedding_dim, est.manifold_dim) == (3, 1)

    def test_indian_pines_like(self):
        est = estimate_dimension(_curve([0.0, 0.01, 0.04, 0.2, 0.25, 0.3]))
        assert (est.embedding_dim, est.manifold_dim) == (4, 2)

    def test_flat(self):
        est = estimate_dimension(_curve([0.01, 0.02, 0.03, 0.04]))
        assert not est.found and est.embedding_dim is None

    def test_first_dim_only_needs_floor(self):
        assert estimate_dimension(_curve([0.5, 0.6])).embedding_dim == 1

    def test_gradual_rise_needs_jump(self):
        # clears the floor at m=3 but without doubling, so the jump at m=5 wins
        est = estimate_dimension(_curve([0.06, 0.09, 0.12, 0.13, 0.4]))
        assert est.embedding_dim == 5

    def test_bad_ratio(self):
        with pytest.raises(InvalidArgumentError):
            estimate_dimension(_curve([0.1]), jump_ratio=1.0)

    @settings(max_examples=200, deadline=None)
    @given(
        st.lists(st.floats(0.0, 1.0), min_size=1, max_size=12),
        st.floats(0.0, 1.0),
        st.floats(0.0, 1.0),
    )
    def test_monotone_in_floor(self, values, f1, f2):
        lo, hi = sorted((f1, f2))
        a = estimate_dimension(_curve(values), floor=lo).embedding_dim
        b = estimate_dimension(_curve(values), floor=hi).embedding_dim
        a = math.inf if a is None else a
        b = math.inf if b is None else b
        assert b >= a


def test_dimension_curve_validates():
    with pytest.raises(InvalidArgumentError):
        DimensionCurve([2, 1], [0.1, 0.2])
    with pytest.raises(InvalidArgumentError):
        DimensionCurve([1, 2], [0.1])
