"""Seeded generators for synthetic manifold samples and a Gaussian noise model."""

from dataclasses import dataclass, field

import numpy as np

from ._validation import check_int, check_points, check_real
from .exceptions import InvalidArgumentError

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True, eq=False)
class DataSet:
    """``k`` points in R^n stored one per row, plus a provenance record."""

    points: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        points = np.array(check_points(self.points), dtype=np.float64)
        points.flags.writeable = False
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "meta", dict(self.meta))

    @property
    def k(self):
        return self.points.shape[0]

    @property
    def n(self):
        return self.points.shape[1]

    def __len__(self):
        return self.k

    def __repr__(self):
        return f"DataSet(k={self.k}, n={self.n}, meta={self.meta!r})"


def _check_count(count):
    return check_int(count, "count", minimum=2)


def _seed_from(rng):
    return int(rng.integers(0, 2**63 - 1))


def trig_moment_map(t):
    """Evaluate (cos t, sin t, cos 2t, sin 2t, ..., cos 5t, sin 5t) row-wise."""
    t = np.atleast_1d(np.asarray(t, dtype=np.float64))
    out = np.empty((t.size, 10))
    for h in range(1, 6):
        out[:, 2 * h - 2] = np.cos(h * t)
        out[:, 2 * h - 1] = np.sin(h * t)
    return out


def curve_map(t):
    """Evaluate (cos t, sin t, cos 2t) row-wise."""
    t = np.atleast_1d(np.asarray(t, dtype=np.float64))
    return np.column_stack([np.cos(t), np.sin(t), np.cos(2 * t)])


def torus_map(theta, phi, R=2.0, r=1.0):
    theta = np.atleast_1d(np.asarray(theta, dtype=np.float64))
    phi = np.atleast_1d(np.asarray(phi, dtype=np.float64))
    ring = R + r * np.cos(phi)
    return np.column_stack([ring * np.cos(theta), ring * np.sin(theta), r * np.sin(phi)])


def random_orthogonal(dim, seed):
    """Haar-distributed orthogonal matrix from a sign-corrected QR factorization."""
    dim = check_int(dim, "dim", minimum=1)
    rng = np.random.default_rng(seed)
    Q, R = np.linalg.qr(rng.standard_normal((dim, dim)))
    signs = np.sign(np.diag(R))
    signs[signs == 0] = 1.0
    return Q * signs


def embed_isometric(data, target_dim, seed):
    """Zero-pad to ``target_dim`` coordinates and apply a seeded rotation."""
    target_dim = check_int(target_dim, "target_dim", minimum=1)
    if target_dim < data.n:
        raise InvalidArgumentError(
            f"target_dim={target_dim} is smaller than the ambient dimension {data.n}"
        )
    padded = np.zeros((data.k, target_dim))
    padded[:, : data.n] = data.points
    Q = random_orthogonal(target_dim, seed)
    meta = dict(data.meta, embedded_dim=target_dim, embed_seed=int(seed), source_dim=data.n)
    return DataSet(padded @ Q.T, meta)


def trig_moment_curve(count, seed):
    """Sample the trigonometric moment curve in R^10 at uniform parameters."""
    count = _check_count(count)
    rng = np.random.default_rng(seed)
    t = rng.uniform(0.0, TWO_PI, count)
    return DataSet(
        trig_moment_map(t),
        {"generator": "trig-moment", "count": count, "seed": int(seed)},
    )


def curve_3d(count, seed, target_dim=15):
    count = _check_count(count)
    target_dim = check_int(target_dim, "target_dim", minimum=3)
    rng = np.random.default_rng(seed)
    t = rng.uniform(0.0, TWO_PI, count)
    base = DataSet(
        curve_map(t),
        {"generator": "curve", "count": count, "seed": int(seed)},
    )
    return embed_isometric(base, target_dim, _seed_from(rng))


def torus(count, seed, R=2.0, r=1.0, target_dim=15):
    """Torus with radii ``R > r``, sampled uniformly in its two angles."""
    count = _check_count(count)
    r = check_real(r, "r", minimum=0.0, strict_minimum=True)
    R = check_real(R, "R", minimum=0.0, strict_minimum=True)
    if R <= r:
        raise InvalidArgumentError(f"torus needs R > r, got R={R}, r={r}")
    target_dim = check_int(target_dim, "target_dim", minimum=3)
    rng = np.random.default_rng(seed)
    angles = rng.uniform(0.0, TWO_PI, (count, 2))
    base = DataSet(
        torus_map(angles[:, 0], angles[:, 1], R, r),
        {"generator": "torus", "count": count, "seed": int(seed), "R": R, "r": r},
    )
    return embed_isometric(base, target_dim, _seed_from(rng))


def sphere3(count, seed, target_dim=15):
    """Uniform sample of the unit 3-sphere in R^4, rotated into ``target_dim``."""
    count = _check_count(count)
    target_dim = check_int(target_dim, "target_dim", minimum=4)
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((count, 4))
    norms = np.linalg.norm(g, axis=1)
    # redraw the (practically impossible) near-zero Gaussian vectors
    bad = norms < 1e-12
    while bad.any():
        g[bad] = rng.standard_normal((int(bad.sum()), 4))
        norms = np.linalg.norm(g, axis=1)
        bad = norms < 1e-12
    base = DataSet(
        g / norms[:, None],
        {"generator": "sphere3", "count": count, "seed": int(seed)},
    )
    return embed_isometric(base, target_dim, _seed_from(rng))


def add_gaussian_noise(data, sigma, seed):
    sigma = check_real(sigma, "sigma", minimum=0.0)
    meta = dict(data.meta, noise_sigma=sigma, noise_seed=int(seed))
    if sigma == 0.0:
        return DataSet(data.points, meta)
    rng = np.random.default_rng(seed)
    return DataSet(data.points + rng.normal(0.0, sigma, data.points.shape), meta)


GENERATORS = {
    "trig-moment": trig_moment_curve,
    "curve": curve_3d,
    "torus": torus,
    "sphere3": sphere3,
}
