"""The Secant-Avoidance Projection iteration.

Starting from the leading left singular vectors of the secant matrix, each
step finds the secant whose projection is shortest and rotates the basis a
little toward it. The objective being raised is ``min_s ||P^T s||``.
"""

import dataclasses
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ._parallel import block_bounds, map_blocks
from ._validation import check_int, check_real, resolve_workers
from .exceptions import InvalidArgumentError, NumericalFailureError, RankDeficiencyError
from .linalg import leading_left_singular_vectors, modified_gram_schmidt
from .synth import DataSet

ORTHONORMAL_TOL = 1e-10
DEGENERATE_TOL = 1e-12
PLATEAU_WINDOW = 20


@dataclass(frozen=True, eq=False)
class ProjectionBasis:
    """An (n, m) matrix with orthonormal columns; the map is ``x -> P^T x``."""

    columns: np.ndarray

    def __post_init__(self):
        P = np.array(self.columns, dtype=np.float64, ndmin=2)
        if P.ndim != 2:
            raise InvalidArgumentError(f"basis must be 2-D, got shape {P.shape}")
        n, m = P.shape
        if not 1 <= m <= n:
            raise InvalidArgumentError(f"basis shape {P.shape} violates 1 <= m <= n")
        if not np.all(np.isfinite(P)):
            raise InvalidArgumentError("basis contains NaN or Inf")
        err = np.abs(P.T @ P - np.eye(m)).max()
        if err > ORTHONORMAL_TOL:
            raise InvalidArgumentError(f"basis columns are not orthonormal (error {err:.3e})")
        P.flags.writeable = False
        object.__setattr__(self, "columns", P)

    @property
    def n(self):
        return self.columns.shape[0]

    @property
    def m(self):
        return self.columns.shape[1]

    def orthonormality_error(self):
        return float(np.abs(self.columns.T @ self.columns - np.eye(self.m)).max())

    def __repr__(self):
        return f"ProjectionBasis(n={self.n}, m={self.m})"


@dataclass(frozen=True)
class SapConfig:
    m: int
    iterations: int = 100
    alpha: float = 0.01
    stop_tolerance: float = None
    return_best: bool = False

    def __post_init__(self):
        object.__setattr__(self, "m", check_int(self.m, "m", minimum=1))
        object.__setattr__(
            self, "iterations", check_int(self.iterations, "iterations", minimum=0)
        )
        object.__setattr__(
            self, "alpha", check_real(self.alpha, "alpha", minimum=0.0, maximum=1.0)
        )
        if self.stop_tolerance is not None:
            object.__setattr__(
                self,
                "stop_tolerance",
                check_real(self.stop_tolerance, "stop_tolerance", minimum=0.0),
            )
        object.__setattr__(self, "return_best", bool(self.return_best))

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)


class IterationRecord(NamedTuple):
    iteration: int
    index: int
    min_norm: float


class StepRecord(NamedTuple):
    """What one step saw: the worst secant under the old basis and the pivot used."""

    index: int
    min_norm: float
    pivot: int
    degenerate: bool


@dataclass(frozen=True, eq=False)
class SapResult:
    final_basis: ProjectionBasis
    best_basis: ProjectionBasis
    history: tuple
    iterations_run: int
    return_best: bool = False

    @property
    def basis(self):
        """The basis downstream consumers should use, per ``return_best``."""
        return self.best_basis if self.return_best else self.final_basis

    @property
    def initial_min_norm(self):
        return self.history[0].min_norm

    @property
    def final_min_norm(self):
        return self.history[-1].min_norm

    @property
    def best_iteration(self):
        norms = [rec.min_norm for rec in self.history]
        return int(np.argmax(norms))

    @property
    def best_min_norm(self):
        return self.history[self.best_iteration].min_norm

    @property
    def min_norm(self):
        return self.best_min_norm if self.return_best else self.final_min_norm


def _check_dims(basis, secants):
    if basis.n != secants.n:
        raise InvalidArgumentError(
            f"basis lives in R^{basis.n} but secants live in R^{secants.n}"
        )
    if secants.p == 0:
        raise InvalidArgumentError("secant set is empty")


def _scan(P, S, workers):
    """Return (argmin, min, argmax, max) of the column norms of ``P^T S``.

    Ties go to the smallest column index.
    """

    def block(a, b):
        Y = P.T @ S[:, a:b]
        norms = np.sqrt(np.einsum("ij,ij->j", Y, Y))
        lo = int(np.argmin(norms))
        hi = int(np.argmax(norms))
        return a + lo, float(norms[lo]), a + hi, float(norms[hi])

    parts = map_blocks(block, block_bounds(S.shape[1]), workers)
    lo_idx, lo_val, hi_idx, hi_val = parts[0]
    for i_lo, v_lo, i_hi, v_hi in parts[1:]:
        if v_lo < lo_val:
            lo_idx, lo_val = i_lo, v_lo
        if v_hi > hi_val:
            hi_idx, hi_val = i_hi, v_hi
    return lo_idx, lo_val, hi_idx, hi_val


def projected_norms(basis, secants):
    """``||P^T s||`` for every secant column."""
    _check_dims(basis, secants)
    Y = basis.columns.T @ secants.secants
    return np.sqrt(np.einsum("ij,ij->j", Y, Y))


def min_projected_secant(basis, secants, n_jobs=None):
    """Index and norm of the secant least preserved by ``basis``."""
    _check_dims(basis, secants)
    idx, val, _, _ = _scan(basis.columns, secants.secants, resolve_workers(n_jobs))
    return idx, val


def init_pca(secants, m, n_jobs=None):
    """Basis of the first ``m`` left singular vectors of the secant matrix."""
    m = check_int(m, "m", minimum=1)
    if m > secants.n:
        raise InvalidArgumentError(f"m={m} exceeds the ambient dimension {secants.n}")
    if secants.p == 0:
        raise InvalidArgumentError("secant set is empty")
    return ProjectionBasis(leading_left_singular_vectors(secants.secants, m, n_jobs))


def _unit(v):
    return v / np.linalg.norm(v)


def sap_step(basis, secants, alpha=0.01, target=None, n_jobs=None):
    """One rotation of ``basis`` toward its worst-preserved secant.

    ``target`` may carry a precomputed ``(index, min_norm)`` for the current
    basis to skip the scan. Returns the new basis and a :class:`StepRecord`.
    """
    alpha = check_real(alpha, "alpha", minimum=0.0, maximum=1.0)
    if target is None:
        target = min_projected_secant(basis, secants, n_jobs)
    else:
        _check_dims(basis, secants)
    j, norm = target
    P = basis.columns
    s = secants.secants[:, j]

    coeffs = P.T @ s
    inside = P @ coeffs
    outside = s - inside
    # second pass keeps the residual orthogonal to span(P) to working precision
    outside -= P @ (P.T @ outside)

    magnitudes = np.abs(coeffs)
    pivot = int(np.argmax(magnitudes)) if magnitudes.max() > 0 else 0
    others = [P[:, k] for k in range(basis.m) if k != pivot]

    degenerate = np.linalg.norm(inside) < DEGENERATE_TOL
    if degenerate:
        lead = P[:, pivot]
        rest = np.array(others).reshape(len(others), basis.n)
        blend = (1.0 - alpha) * lead + alpha * outside
    else:
        try:
            Q = modified_gram_schmidt([inside] + others)
        except RankDeficiencyError as exc:
            raise NumericalFailureError(
                f"Gram-Schmidt lost rank while targeting secant {j}: {exc}"
            ) from exc
        lead = Q[0]
        rest = Q[1:]
        blend = (1.0 - alpha) * inside + alpha * outside

    blend_norm = np.linalg.norm(blend)
    first = blend / blend_norm if blend_norm > DEGENERATE_TOL else lead
    new_basis = ProjectionBasis(np.column_stack([first, *rest]))
    return new_basis, StepRecord(int(j), float(norm), pivot, bool(degenerate))


def run_sap(secants, config, n_jobs=None, callback=None):
    """Run the full iteration from the PCA start.

    ``history[i]`` describes the basis after ``i`` steps. With
    ``config.stop_tolerance`` set, the loop stops once the best value has
    gained no more than that over the last 20 iterations. ``callback``,
    if given, receives each :class:`IterationRecord` as it is produced.
    """
    if not isinstance(config, SapConfig):
        raise InvalidArgumentError("config must be a SapConfig")
    if config.m > secants.n:
        raise InvalidArgumentError(
            f"m={config.m} exceeds the ambient dimension {secants.n}"
        )
    workers = resolve_workers(n_jobs)
    basis = init_pca(secants, config.m, workers)
    target = min_projected_secant(basis, secants, workers)
    history = [IterationRecord(0, *target)]
    best_basis, best_val = basis, target[1]
    best_trace = [best_val]
    if callback is not None:
        callback(history[-1])

    for i in range(1, config.iterations + 1):
        basis, _ = sap_step(basis, secants, config.alpha, target=target, n_jobs=workers)
        target = min_projected_secant(basis, secants, workers)
        history.append(IterationRecord(i, *target))
        if callback is not None:
            callback(history[-1])
        if target[1] > best_val:
            best_basis, best_val = basis, target[1]
        best_trace.append(best_val)
        if (
            config.stop_tolerance is not None
            and i >= PLATEAU_WINDOW
            and best_val - best_trace[i - PLATEAU_WINDOW] <= config.stop_tolerance
        ):
            break

    return SapResult(
        final_basis=basis,
        best_basis=best_basis,
        history=tuple(history),
        iterations_run=len(history) - 1,
        return_best=config.return_best,
    )


def project(basis, data):
    """Reduce every point of ``data`` to its coordinates ``P^T x``."""
    if not isinstance(data, DataSet):
        data = DataSet(data)
    if basis.n != data.n:
        raise InvalidArgumentError(
            f"basis lives in R^{basis.n} but the data live in R^{data.n}"
        )
    meta = dict(data.meta, projected_dim=basis.m)
    return DataSet(data.points @ basis.columns, meta)
