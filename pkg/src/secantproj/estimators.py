"""scikit-learn compatible wrappers around the secant-avoidance machinery."""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted, validate_data

from .analysis import estimate_dimension, sweep
from .sap import SapConfig, run_sap
from .secants import DEDUP_EPSILON, compute_secants
from .synth import DataSet


class SecantAvoidingProjection(TransformerMixin, BaseEstimator):
    """Linear reduction to ``n_components`` dimensions that keeps secants long.

    Parameters
    ----------
    n_components : int, default=3
        Target dimension ``m``.
    n_iter : int, default=100
        Maximum number of SAP steps; 0 keeps the PCA start.
    alpha : float, default=0.01
        Shift toward the worst secant per step, in [0, 1].
    threshold : float or None, default=None
        Drop secants shorter than this before normalizing (noise suppression).
    stop_tolerance : float or None, default=None
        Plateau tolerance for early stopping; ``None`` runs all iterations.
    return_best : bool, default=False
        Use the best iterate instead of the last one.
    dedup_epsilon : float, default=1e-12
        Pairs closer than this are treated as duplicates and skipped.
    memory_budget : int or None, default=None
        Byte limit for the secant matrix (default 8 GiB or the environment
        override).
    n_jobs : int or None, default=None
        Worker threads; results do not depend on it.

    Attributes
    ----------
    components_ : ndarray of shape (n_components, n_features_in_)
        Rows are the orthonormal projection directions.
    basis_ : ProjectionBasis
    result_ : SapResult
    min_norm_ : float
        Shortest projected unit secant of the training data under ``basis_``.
    n_secants_ : int
    """

    def __init__(
        self,
        n_components=3,
        n_iter=100,
        alpha=0.01,
        threshold=None,
        stop_tolerance=None,
        return_best=False,
        dedup_epsilon=DEDUP_EPSILON,
        memory_budget=None,
        n_jobs=None,
    ):
        self.n_components = n_components
        self.n_iter = n_iter
        self.alpha = alpha
        self.threshold = threshold
        self.stop_tolerance = stop_tolerance
        self.return_best = return_best
        self.dedup_epsilon = dedup_epsilon
        self.memory_budget = memory_budget
        self.n_jobs = n_jobs

    def _config(self):
        return SapConfig(
            m=self.n_components,
            iterations=self.n_iter,
            alpha=self.alpha,
            stop_tolerance=self.stop_tolerance,
            return_best=self.return_best,
        )

    def fit(self, X, y=None):
        X = validate_data(self, X, dtype=np.float64, ensure_min_samples=2)
        config = self._config()
        secants = compute_secants(
            DataSet(X),
            threshold=self.threshold,
            dedup_epsilon=self.dedup_epsilon,
            memory_budget=self.memory_budget,
            n_jobs=self.n_jobs,
        )
        result = run_sap(secants, config, self.n_jobs)
        self.result_ = result
        self.basis_ = result.basis
        self.components_ = result.basis.columns.T.copy()
        self.min_norm_ = result.min_norm
        self.n_secants_ = secants.p
        return self

    def transform(self, X):
        check_is_fitted(self, "components_")
        X = validate_data(self, X, dtype=np.float64, reset=False)
        return X @ self.components_.T

    def inverse_transform(self, X):
        """Map reduced coordinates back into the span of the components."""
        check_is_fitted(self, "components_")
        X = np.asarray(X, dtype=np.float64)
        return X @ self.components_

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "components_")
        return np.array([f"sap{i}" for i in range(self.components_.shape[0])], dtype=object)


class SecantDimensionEstimator(BaseEstimator):
    """Estimate embedding and manifold dimension from a min-norm sweep.

    ``dims=None`` tests every dimension from 1 to the number of features.
    After ``fit``, ``curve_`` holds the sweep, ``embedding_dim_`` and
    ``manifold_dim_`` the heuristic readings (``None`` if nothing qualified).
    """

    def __init__(
        self,
        dims=None,
        n_iter=100,
        alpha=0.01,
        threshold=None,
        jump_ratio=2.0,
        floor=0.1,
        memory_budget=None,
        n_jobs=None,
    ):
        self.dims = dims
        self.n_iter = n_iter
        self.alpha = alpha
        self.threshold = threshold
        self.jump_ratio = jump_ratio
        self.floor = floor
        self.memory_budget = memory_budget
        self.n_jobs = n_jobs

    def fit(self, X, y=None):
        X = validate_data(self, X, dtype=np.float64, ensure_min_samples=2)
        dims = range(1, X.shape[1] + 1) if self.dims is None else self.dims
        config = SapConfig(1, iterations=self.n_iter, alpha=self.alpha)
        curve = sweep(
            DataSet(X),
            dims,
            config,
            threshold=self.threshold,
            memory_budget=self.memory_budget,
            n_jobs=self.n_jobs,
        )
        estimate = estimate_dimension(curve, self.jump_ratio, self.floor)
        self.curve_ = curve.with_estimate(estimate)
        self.embedding_dim_ = estimate.embedding_dim
        self.manifold_dim_ = estimate.manifold_dim
        return self
