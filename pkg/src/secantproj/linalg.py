"""Thin SVD and modified Gram-Schmidt."""

from typing import NamedTuple

import numpy as np

from ._parallel import block_bounds, map_blocks
from ._validation import check_int, resolve_workers
from .exceptions import InvalidArgumentError, NumericalFailureError, RankDeficiencyError

INDEPENDENCE_TOL = 1e-10


class SvdFactors(NamedTuple):
    U: np.ndarray
    sigma: np.ndarray
    V: np.ndarray


def _check_matrix(S):
    S = np.asarray(S, dtype=np.float64)
    if S.ndim != 2 or S.shape[0] < 1 or S.shape[1] < 1:
        raise InvalidArgumentError(f"expected a non-empty 2-D matrix, got shape {S.shape}")
    if not np.all(np.isfinite(S)):
        raise InvalidArgumentError("matrix contains NaN or Inf")
    return S


def fix_signs(U, *others):
    """Flip columns so each column of ``U`` has its largest-magnitude entry positive.

    The same flips are applied to the matching columns of ``others``.
    """
    pivot = np.argmax(np.abs(U), axis=0)
    signs = np.sign(U[pivot, np.arange(U.shape[1])])
    signs[signs == 0] = 1.0
    return (U * signs,) + tuple(M * signs for M in others)


def gram_matrix(S, n_jobs=None):
    """``S @ S.T`` summed over fixed column blocks in block order."""
    S = _check_matrix(S)
    workers = resolve_workers(n_jobs)
    partial = map_blocks(lambda a, b: S[:, a:b] @ S[:, a:b].T, block_bounds(S.shape[1]), workers)
    G = partial[0].copy()
    for block in partial[1:]:
        G += block
    # symmetrize away round-off so eigh sees an exactly symmetric input
    return 0.5 * (G + G.T)


def _eigh_descending(G):
    try:
        w, Q = np.linalg.eigh(G)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailureError(f"symmetric eigensolver failed: {exc}") from exc
    return w[::-1], Q[:, ::-1]


def leading_left_singular_vectors(S, m, n_jobs=None):
    """First ``m`` left singular vectors of ``S`` via the n x n Gram matrix.

    Never forms anything of size p x p or p x m, so it suits secant
    matrices with millions of columns.
    """
    S = _check_matrix(S)
    m = check_int(m, "m", minimum=1, maximum=S.shape[0])
    _, Q = _eigh_descending(gram_matrix(S, n_jobs))
    (U,) = fix_signs(Q[:, :m])
    return U


def thin_svd(S, method="lapack", n_jobs=None):
    """Thin SVD ``S = U diag(sigma) V^T`` with q = min(n, p) and canonical signs.

    ``method="lapack"`` runs a direct SVD. ``method="gram"`` eigensolves the
    n x n Gram matrix and recovers ``V`` from ``S^T U``; it squares the
    condition number, so trailing singular triplets of ill-conditioned
    inputs lose accuracy. Use it only when p >> n and the leading
    subspace is what matters.
    """
    S = _check_matrix(S)
    n, p = S.shape
    if method == "lapack":
        try:
            U, sigma, Vt = np.linalg.svd(S, full_matrices=False)
        except np.linalg.LinAlgError as exc:
            raise NumericalFailureError(
                f"SVD did not converge for a {n}x{p} matrix "
                f"(max |entry| {np.abs(S).max():.3e})"
            ) from exc
        U, V = fix_signs(U, Vt.T)
        return SvdFactors(U, sigma, V)
    if method != "gram":
        raise InvalidArgumentError(f"unknown SVD method {method!r}")
    if p < n:
        Ut, sigma, Vt = thin_svd(S.T, method="gram", n_jobs=n_jobs)
        U, V = fix_signs(Vt, Ut)
        return SvdFactors(U, sigma, V)
    w, U = _eigh_descending(gram_matrix(S, n_jobs))
    sigma = np.sqrt(np.clip(w, 0.0, None))
    # eigenvalues are only accurate to ~eps * sigma_1^2, so singular values
    # below sqrt(eps * n) * sigma_1 are indistinguishable from zero
    cutoff = sigma[0] * np.sqrt(np.finfo(float).eps * n)
    live = sigma > cutoff
    V = np.zeros((p, n))
    V[:, live] = (S.T @ U[:, live]) / sigma[live]
    if not live.all():
        # complete V with directions orthogonal to the recovered columns
        r = int(live.sum())
        fill, _ = np.linalg.qr(np.column_stack([V[:, live], np.eye(p, n - r)]))
        V[:, ~live] = fill[:, r:]
        sigma[~live] = 0.0
    U, V = fix_signs(U, V)
    return SvdFactors(U, sigma, V)


def modified_gram_schmidt(vectors, tol=INDEPENDENCE_TOL):
    """Orthonormalize ``vectors`` in order with modified Gram-Schmidt.

    ``vectors`` is a sequence of 1-D arrays (or a 2-D array whose rows are the
    vectors). Returns a (count, n) array whose rows are orthonormal. A vector
    whose residual drops below ``tol`` times its own norm raises
    :class:`RankDeficiencyError` naming its 1-based position.
    """
    Q = np.array(vectors, dtype=np.float64, ndmin=2)
    if Q.ndim != 2:
        raise InvalidArgumentError("expected a sequence of equal-length vectors")
    scale = np.linalg.norm(Q, axis=1)
    for i in range(Q.shape[0]):
        for j in range(i):
            Q[i] -= (Q[j] @ Q[i]) * Q[j]
        residual = np.linalg.norm(Q[i])
        if scale[i] == 0.0 or residual < tol * scale[i]:
            raise RankDeficiencyError(i + 1, residual)
        Q[i] /= residual
    return Q
