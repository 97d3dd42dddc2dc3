"""Normalized secant sets: construction, thresholding and point subsampling."""

from dataclasses import dataclass

import numpy as np

from ._parallel import BLOCK_SIZE, map_blocks
from ._validation import (
    check_int,
    check_real,
    resolve_memory_budget,
    resolve_workers,
)
from .exceptions import EmptySecantSetError, InvalidArgumentError, MemoryBudgetError
from .synth import DataSet

DEDUP_EPSILON = 1e-12


def secant_count(k):
    """Number of unordered pairs among ``k`` points."""
    k = check_int(k, "k", minimum=0)
    return k * (k - 1) // 2


@dataclass(frozen=True, eq=False)
class SecantSet:
    """Unit secants stored as the columns of an (n, p) matrix.

    Column ``c`` is ``(x[i] - x[j]) / lengths[c]`` for ``pairs[c] == (i, j)``
    with ``i < j``. ``pairs`` is ``None`` for sets built directly from
    direction vectors.
    """

    secants: np.ndarray
    lengths: np.ndarray
    pairs: np.ndarray = None
    threshold: float = None
    dropped_duplicates: int = 0
    dropped_short: int = 0

    @property
    def n(self):
        return self.secants.shape[0]

    @property
    def p(self):
        return self.secants.shape[1]

    def __len__(self):
        return self.p

    def __repr__(self):
        return (
            f"SecantSet(n={self.n}, p={self.p}, threshold={self.threshold}, "
            f"dropped_duplicates={self.dropped_duplicates}, dropped_short={self.dropped_short})"
        )

    @classmethod
    def from_vectors(cls, vectors):
        """Normalize the columns of an (n, p) array into a secant set."""
        S = np.array(vectors, dtype=np.float64, ndmin=2)
        if S.ndim != 2 or S.shape[1] == 0:
            raise InvalidArgumentError("expected a non-empty (n, p) array of vectors")
        if not np.all(np.isfinite(S)):
            raise InvalidArgumentError("secant vectors must be finite")
        lengths = np.linalg.norm(S, axis=0)
        if np.any(lengths <= DEDUP_EPSILON):
            raise InvalidArgumentError("zero-length vector cannot be normalized")
        S = np.asfortranarray(S / lengths)
        S.flags.writeable = False
        return cls(S, lengths)


def _row_blocks(k, target=None):
    """Split rows 0..k-2 into contiguous runs holding ~``target`` pairs each."""
    target = target or BLOCK_SIZE
    blocks = []
    start, acc = 0, 0
    for i in range(k - 1):
        acc += k - 1 - i
        if acc >= target:
            blocks.append((start, i + 1))
            start, acc = i + 1, 0
    if start < k - 1:
        blocks.append((start, k - 1))
    return blocks


def _pairs_for_rows(k, start, stop):
    rows = np.arange(start, stop)
    counts = k - 1 - rows
    ii = np.repeat(rows, counts)
    row_offsets = np.cumsum(counts) - counts
    local = np.arange(counts.sum()) - np.repeat(row_offsets, counts)
    jj = ii + 1 + local
    return ii, jj


def compute_secants(
    data,
    threshold=None,
    dedup_epsilon=DEDUP_EPSILON,
    memory_budget=None,
    n_jobs=None,
):
    """Build the unit secant set of ``data``.

    Pairs whose difference has norm ``<= dedup_epsilon`` are dropped as
    duplicates; with ``threshold`` set, pairs shorter than it are dropped as
    well (both counts are reported on the result). Columns follow the
    lexicographic order of ``(i, j)`` for any ``n_jobs``.
    """
    if not isinstance(data, DataSet):
        data = DataSet(data)
    if data.k < 2:
        raise InvalidArgumentError("need at least two points to form a secant")
    if threshold is not None:
        threshold = check_real(threshold, "threshold", minimum=0.0)
    dedup_epsilon = check_real(dedup_epsilon, "dedup_epsilon", minimum=0.0)
    budget = resolve_memory_budget(memory_budget)
    workers = resolve_workers(n_jobs)

    k, n = data.k, data.n
    needed = secant_count(k) * n * 8
    if needed > budget:
        raise MemoryBudgetError(
            f"{secant_count(k)} secants in R^{n} need {needed} bytes, over the "
            f"budget of {budget}; subsample the data first"
        )

    X = data.points
    blocks = _row_blocks(k)

    def classify(start, stop):
        ii, jj = _pairs_for_rows(k, start, stop)
        diff = X[ii] - X[jj]
        lengths = np.sqrt(np.einsum("ij,ij->i", diff, diff))
        dup = lengths <= dedup_epsilon
        keep = ~dup
        n_short = 0
        if threshold is not None:
            short = keep & (lengths < threshold)
            keep &= ~short
            n_short = int(short.sum())
        return keep, int(dup.sum()), n_short

    # pass 1 fixes every block's output offset; pass 2 writes in place, so
    # peak memory stays near the size of the final matrix
    marks = map_blocks(classify, blocks, workers)
    counts = [int(keep.sum()) for keep, _, _ in marks]
    p = sum(counts)
    n_dup = sum(m[1] for m in marks)
    n_short = sum(m[2] for m in marks)
    if p == 0:
        raise EmptySecantSetError(
            f"all {secant_count(k)} secants were dropped "
            f"({n_dup} duplicates, {n_short} below threshold)"
        )
    offsets = np.concatenate([[0], np.cumsum(counts)])
    rows = np.empty((p, n))
    lengths = np.empty(p)
    pairs = np.empty((p, 2), dtype=np.intp)

    def fill(b):
        (start, stop), keep = blocks[b], marks[b][0]
        lo, hi = offsets[b], offsets[b + 1]
        ii, jj = _pairs_for_rows(k, start, stop)
        ii, jj = ii[keep], jj[keep]
        diff = X[ii] - X[jj]
        length = np.sqrt(np.einsum("ij,ij->i", diff, diff))
        rows[lo:hi] = diff / length[:, None]
        lengths[lo:hi] = length
        pairs[lo:hi, 0] = ii
        pairs[lo:hi, 1] = jj

    map_blocks(lambda b, _: fill(b), [(b, b + 1) for b in range(len(blocks))], workers)
    # (p, n) C-order transposes to (n, p) Fortran order: contiguous columns
    S = rows.T
    for arr in (S, lengths, pairs):
        arr.flags.writeable = False
    return SecantSet(S, lengths, pairs, threshold, n_dup, n_short)


def subsample(data, count, seed):
    """Uniform sample of ``count`` points without replacement, parent order kept."""
    count = check_int(count, "count", minimum=2)
    if count > data.k:
        raise InvalidArgumentError(f"cannot sample {count} points from {data.k}")
    rng = np.random.default_rng(seed)
    idx = np.sort(rng.choice(data.k, size=count, replace=False))
    meta = {"generator": "subsample", "count": count, "seed": int(seed), "parent": data.meta}
    return DataSet(data.points[idx], meta)
