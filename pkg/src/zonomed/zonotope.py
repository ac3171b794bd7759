"""Zonotopes aggregated from point samples and their intrinsic volumes.

A zonotope here is a Minkowski sum of segments [0, g_i] shifted by a center.
The discrepancy zonotope of a sample x_1..x_n at a query point x uses the
generators g_i = x - x_i, so every size functional of it measures how far x
sits from the sample as a whole.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

# Batched determinant evaluation is chunked to bound memory.
_DET_CHUNK = 65_536


@dataclass
class PointCloud:
    """A sample of n points in R^d, one point per row."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        if pts.ndim != 2:
            raise ValueError(f"points must be an (n, d) array, got shape {pts.shape}")
        if pts.shape[0] < 1 or pts.shape[1] < 1:
            raise ValueError("need at least one point of dimension >= 1")
        if not np.all(np.isfinite(pts)):
            raise ValueError("points must be finite")
        self.points = pts

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]


@dataclass
class Zonotope:
    """Minkowski sum of segments [0, g_i] translated by ``center``.

    ``generators`` is an (m, d) array, one generator per row; ``center``
    defaults to the origin.  Intrinsic volumes never depend on the center.
    """

    generators: np.ndarray
    center: np.ndarray | None = None

    def __post_init__(self):
        gens = np.asarray(self.generators, dtype=float)
        if gens.size == 0:
            if self.center is None:
                raise ValueError("empty generator list needs an explicit center")
            gens = gens.reshape(0, np.asarray(self.center).size)
        gens = np.atleast_2d(gens)
        if gens.ndim != 2:
            raise ValueError(f"generators must be an (m, d) array, got shape {gens.shape}")
        if not np.all(np.isfinite(gens)):
            raise ValueError("generators must be finite")
        if self.center is None:
            center = np.zeros(gens.shape[1])
        else:
            center = np.asarray(self.center, dtype=float).reshape(-1)
            if center.size != gens.shape[1]:
                raise ValueError(
                    f"center dimension {center.size} does not match generators ({gens.shape[1]})"
                )
        self.generators = gens
        self.center = center

    @property
    def dim(self) -> int:
        return self.generators.shape[1]

    @property
    def num_generators(self) -> int:
        return self.generators.shape[0]


@dataclass(frozen=True)
class BallConstants:
    """Volume of the unit ball B_j in R^j."""

    j: int
    vol: float

    @classmethod
    def of(cls, j: int) -> "BallConstants":
        return cls(j, unit_ball_volume(j))


@dataclass(frozen=True)
class MonteCarloEstimate:
    """A sample-mean estimate together with its standard error."""

    estimate: float
    std_error: float
    samples: int = field(default=0, compare=False)


def unit_ball_volume(j: int) -> float:
    """vol_j(B_j) = pi^(j/2) / Gamma(j/2 + 1); 1, 2, pi, 4pi/3, ... for j = 0, 1, 2, 3.

    Evaluated by the two-step recurrence vol_j = vol_{j-2} * 2 pi / j, which
    hits the small cases exactly.
    """
    if j < 0:
        raise ValueError("dimension must be nonnegative")
    vol = 1.0 if j % 2 == 0 else 2.0
    for k in range(2 + j % 2, j + 1, 2):
        vol *= 2.0 * math.pi / k
    return vol


def build_discrepancy_zonotope(x, cloud: PointCloud) -> Zonotope:
    """Zonotope with generators x - x_i, one per sample point, centered at 0."""
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.size != cloud.dim:
        raise ValueError(f"query point has dimension {x.size}, cloud has {cloud.dim}")
    return Zonotope(x[None, :] - cloud.points)


def _abs_dets(mats: np.ndarray) -> np.ndarray:
    """|det| of a stacked (..., j, j) array, with fast paths for j <= 3."""
    j = mats.shape[-1]
    if j == 1:
        return np.abs(mats[..., 0, 0])
    if j == 2:
        return np.abs(mats[..., 0, 0] * mats[..., 1, 1] - mats[..., 0, 1] * mats[..., 1, 0])
    if j == 3:
        a, b, c = mats[..., 0, 0], mats[..., 0, 1], mats[..., 0, 2]
        d, e, f = mats[..., 1, 0], mats[..., 1, 1], mats[..., 1, 2]
        g, h, i = mats[..., 2, 0], mats[..., 2, 1], mats[..., 2, 2]
        return np.abs(a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g))
    return np.abs(np.linalg.det(mats))


def _subset_index_batches(m: int, j: int):
    """Yield (batch, j) integer arrays covering all j-subsets of range(m)."""
    combos = itertools.combinations(range(m), j)
    while True:
        batch = list(itertools.islice(combos, _DET_CHUNK))
        if not batch:
            return
        yield np.asarray(batch, dtype=np.intp)


def _compensated_total(chunks: list[np.ndarray]) -> float:
    # exact rounding of the true sum, so generator order cannot matter
    return math.fsum(math.fsum(c.tolist()) for c in chunks)


def intrinsic_volume(zonotope: Zonotope, j: int) -> float:
    """Exact j-th intrinsic volume of a zonotope.

    Sums, over all j-subsets S of the generators, the j-volume of the
    parallelepiped they span, computed as sqrt(det(G_S' G_S)).  V_0 = 1 and
    V_j = 0 for j above the ambient dimension.  Repeated generators count
    once per index subset (multiset semantics).
    """
    return intrinsic_volume_of_generators(zonotope.generators, j)


def intrinsic_volume_of_generators(generators: np.ndarray, j: int) -> float:
    """intrinsic_volume on a raw (m, d) generator array."""
    if j < 0:
        raise ValueError("intrinsic volume order must be nonnegative")
    G = np.asarray(generators, dtype=float)
    if j == 0:
        return 1.0
    if j > G.shape[1]:
        return 0.0
    m = G.shape[0]
    if m < j:
        return 0.0
    if j == 1:
        norms = np.sqrt(np.einsum("ij,ij->i", G, G))
        return _compensated_total([norms])
    gram = G @ G.T
    if j == 2:
        i_idx, k_idx = np.triu_indices(m, k=1)
        sq = gram[i_idx, i_idx] * gram[k_idx, k_idx] - gram[i_idx, k_idx] ** 2
        vols = np.sqrt(np.maximum(sq, 0.0))  # negatives are round-off only
        return _compensated_total([vols])
    chunks = []
    for idx in _subset_index_batches(m, j):
        sub = gram[idx[:, :, None], idx[:, None, :]]
        dets = np.linalg.det(sub)
        chunks.append(np.sqrt(np.maximum(dets, 0.0)))
    return _compensated_total(chunks)


def mc_intrinsic_volume(
    zonotope: Zonotope, j: int, samples: int, seed: int
) -> MonteCarloEstimate:
    """Monte Carlo estimate of V_j via random Gaussian projections.

    Draws j x d standard Gaussian matrices M, measures the j-volume of the
    projected zonotope M Z (the sum of |det(M G_S)| over j-subsets S), and
    rescales the sample mean by (2 pi)^(j/2) / (j! vol_j(B_j)).

    Returns the estimate with the standard error of the mean.
    """
    d = zonotope.dim
    if not 1 <= j <= d:
        raise ValueError(f"need 1 <= j <= d, got j={j}, d={d}")
    if samples < 1:
        raise ValueError("samples must be positive")
    G = zonotope.generators
    m = G.shape[0]
    scale = (2.0 * math.pi) ** (j / 2) / (math.factorial(j) * unit_ball_volume(j))
    rng = np.random.default_rng(seed)
    subset_batches = list(_subset_index_batches(m, j)) if m >= j else []
    vals = np.zeros(samples)
    chunk = max(1, _DET_CHUNK // max(1, math.comb(m, j)))
    done = 0
    while done < samples:
        b = min(chunk, samples - done)
        M = rng.standard_normal((b, j, d))
        proj = M @ G.T  # (b, j, m): column i is M g_i
        total = np.zeros(b)
        for idx in subset_batches:
            sub = proj[:, :, idx]  # (b, j, nsub, j)
            total += _abs_dets(np.swapaxes(sub, 1, 2)).sum(axis=1)
        vals[done : done + b] = total
        done += b
    mean = float(np.mean(vals))
    se = float(np.std(vals, ddof=1) / math.sqrt(samples)) if samples > 1 else 0.0
    return MonteCarloEstimate(scale * mean, scale * se, samples)


def wills_functional(zonotope: Zonotope) -> float:
    """W(Z) = 1 + V_1(Z) + ... + V_d(Z)."""
    return 1.0 + math.fsum(
        intrinsic_volume(zonotope, j) for j in range(1, zonotope.dim + 1)
    )


def wills_of_generators(generators: np.ndarray, dim: int) -> float:
    """wills_functional on a raw generator array."""
    return 1.0 + math.fsum(
        intrinsic_volume_of_generators(generators, j) for j in range(1, dim + 1)
    )
