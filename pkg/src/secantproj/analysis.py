"""Baselines, bi-Lipschitz bounds, dimension sweeps and the dimension heuristic."""

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from ._validation import check_int, check_real, resolve_workers
from .exceptions import InvalidArgumentError
from .sap import ProjectionBasis, SapConfig, _check_dims, _scan, init_pca, run_sap
from .secants import compute_secants, subsample


@dataclass(frozen=True)
class BiLipschitzBounds:
    """Constants with ``m1 |x - y| <= |P^T (x - y)| <= m2 |x - y|`` on the sample.

    The inverse map on the image has Lipschitz constant ``inverse_m2 = 1/m1``
    (``inf`` when some secant collapses) and lower bound ``inverse_m1 = 1/m2``.
    """

    m1: float
    m2: float
    inverse_m1: float
    inverse_m2: float

    @property
    def injective(self):
        return self.m1 > 0.0


def bilipschitz_constants(basis, secants, n_jobs=None):
    _check_dims(basis, secants)
    _, m1, _, m2 = _scan(basis.columns, secants.secants, resolve_workers(n_jobs))
    inverse_m1 = 1.0 / m2 if m2 > 0 else math.inf
    inverse_m2 = 1.0 / m1 if m1 > 0 else math.inf
    return BiLipschitzBounds(m1, m2, inverse_m1, inverse_m2)


def naive_projection(n, m):
    """Projection onto the first ``m`` coordinate axes."""
    n = check_int(n, "n", minimum=1)
    m = check_int(m, "m", minimum=1)
    if m > n:
        raise InvalidArgumentError(f"m={m} exceeds n={n}")
    return ProjectionBasis(np.eye(n, m))


@dataclass(frozen=True, eq=False)
class Comparison:
    naive: float
    pca: float
    sap: float
    result: object

    def as_dict(self):
        return {"naive": self.naive, "pca": self.pca, "sap": self.sap}


def compare_projections(
    data, m, config=None, threshold=None, memory_budget=None, n_jobs=None, secants=None
):
    """Shortest projected secant under the naive, PCA-start and SAP bases.

    The SAP figure follows ``config.return_best``.
    """
    m = check_int(m, "m", minimum=1)
    if m > data.n:
        raise InvalidArgumentError(f"m={m} exceeds the ambient dimension {data.n}")
    config = SapConfig(m) if config is None else config.replace(m=m)
    workers = resolve_workers(n_jobs)
    if secants is None:
        secants = compute_secants(
            data, threshold=threshold, memory_budget=memory_budget, n_jobs=workers
        )
    naive = bilipschitz_constants(naive_projection(data.n, m), secants, workers).m1
    result = run_sap(secants, config, workers)
    return Comparison(naive, result.initial_min_norm, result.min_norm, result)


@dataclass(frozen=True, eq=False)
class DimensionCurve:
    """Shortest projected secant norm against projection dimension.

    ``min_norms`` holds the best value seen during each run, ``init_norms``
    the value at the PCA start.
    """

    dims: tuple
    min_norms: tuple
    init_norms: tuple = ()
    final_norms: tuple = ()
    meta: dict = field(default_factory=dict)
    estimate: object = None

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if any(b <= a for a, b in zip(dims, dims[1:])):
            raise InvalidArgumentError(f"dims must be strictly increasing, got {dims}")
        if len(self.min_norms) != len(dims):
            raise InvalidArgumentError("dims and min_norms differ in length")
        object.__setattr__(self, "dims", dims)
        for name in ("min_norms", "init_norms", "final_norms"):
            object.__setattr__(self, name, tuple(float(v) for v in getattr(self, name)))

    def __len__(self):
        return len(self.dims)

    def with_estimate(self, estimate):
        return DimensionCurve(
            self.dims, self.min_norms, self.init_norms, self.final_norms, self.meta, estimate
        )


def _check_dims_list(dims, n):
    dims = [check_int(d, "dim", minimum=1) for d in dims]
    if not dims:
        raise InvalidArgumentError("dims must be non-empty")
    if max(dims) > n:
        raise InvalidArgumentError(f"dimension {max(dims)} exceeds the ambient dimension {n}")
    return sorted(set(dims))


def sweep(
    data,
    dims,
    config=None,
    threshold=None,
    memory_budget=None,
    n_jobs=None,
    secants=None,
):
    """Run SAP once per projection dimension over one shared secant set."""
    dims = _check_dims_list(dims, data.n)
    config = SapConfig(dims[0]) if config is None else config
    workers = resolve_workers(n_jobs)
    if secants is None:
        secants = compute_secants(
            data, threshold=threshold, memory_budget=memory_budget, n_jobs=workers
        )
    best, init, final = [], [], []
    for m in dims:
        result = run_sap(secants, config.replace(m=m), workers)
        best.append(result.best_min_norm)
        init.append(result.initial_min_norm)
        final.append(result.final_min_norm)
    meta = {
        "iterations": config.iterations,
        "alpha": config.alpha,
        "stop_tolerance": config.stop_tolerance,
        "threshold": secants.threshold,
        "points": data.k,
        "secants": secants.p,
        "data": data.meta,
    }
    return DimensionCurve(dims, best, init, final, meta)


@dataclass(frozen=True, eq=False)
class RepeatedSweep:
    curves: list
    seeds: list
    dims: tuple
    mean: np.ndarray
    spread: np.ndarray


def derive_seeds(seed, count):
    """Independent integer seeds spawned from one base seed."""
    children = np.random.SeedSequence(seed).spawn(count)
    return [int(child.generate_state(1, dtype=np.uint32)[0]) for child in children]


def repeated_sample_sweep(
    data,
    sample_size,
    runs,
    dims,
    config=None,
    seed=0,
    threshold=None,
    memory_budget=None,
    n_jobs=None,
):
    """Sweep ``runs`` independent subsamples of ``sample_size`` points each.

    Returns every curve plus the per-dimension mean and standard deviation.
    """
    sample_size = check_int(sample_size, "sample_size", minimum=2, maximum=data.k)
    runs = check_int(runs, "runs", minimum=1)
    dims = _check_dims_list(dims, data.n)
    seeds = derive_seeds(seed, runs)
    curves = []
    for run_id, sub_seed in enumerate(seeds):
        sample = subsample(data, sample_size, sub_seed)
        curve = sweep(
            sample,
            dims,
            config,
            threshold=threshold,
            memory_budget=memory_budget,
            n_jobs=n_jobs,
        )
        curve.meta.update(run_id=run_id, sample_seed=sub_seed)
        curves.append(curve)
    table = np.array([c.min_norms for c in curves])
    return RepeatedSweep(curves, seeds, tuple(dims), table.mean(axis=0), table.std(axis=0))


class DimensionEstimate(NamedTuple):
    embedding_dim: int = None
    manifold_dim: int = None

    @property
    def found(self):
        return self.embedding_dim is not None


def estimate_dimension(curve, jump_ratio=2.0, floor=0.1):
    """Locate the dimension where the curve leaves zero.

    The embedding dimension is the first ``m`` whose value is at least
    ``floor`` and at least ``jump_ratio`` times the value at the previous
    tested dimension (the first dimension only needs the floor). Inverting
    Whitney's ``2d + 1`` bound gives the manifold estimate
    ``ceil((m - 1) / 2)``. Returns ``DimensionEstimate(None, None)`` when no
    dimension qualifies.
    """
    jump_ratio = check_real(jump_ratio, "jump_ratio", minimum=1.0, strict_minimum=True)
    floor = check_real(floor, "floor", minimum=0.0)
    if len(curve.dims) == 0:
        raise InvalidArgumentError("curve is empty")
    prev = None
    for m, value in zip(curve.dims, curve.min_norms):
        if value >= floor and (prev is None or value >= jump_ratio * prev):
            return DimensionEstimate(m, math.ceil((m - 1) / 2))
        prev = value
    return DimensionEstimate()
