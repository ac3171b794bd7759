"""Sample-based Steiner symmetrization and exact 2D polygon symmetrals.

The measure-level symmetrization X -> X - u E[u'X | P X] is applied to a
finite sample by estimating the conditional expectation of the u-coordinate
given the coordinates in the hyperplane u-perp, either by k-nearest-neighbor
averaging or by ordinary least squares (exact for Gaussian laws).  The
classical chord-shifting symmetral of a convex polygon is computed exactly
for cross-validation, and an explorer applies repeated random-direction
steps while reporting isotropy diagnostics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .directions import random_direction, sphere_directions
from .errors import DegeneratePolygonError
from .gauss import _check_unit, _sorted_eigh
from .polygon import (
    ConvexPolygon2D,
    _prune_collinear,
    clip_polygon_to_rect,
    distances_to_polygon,
    polygon_area,
)


@dataclass
class EmpiricalSample:
    """N draws in R^d, one per row."""

    draws: np.ndarray

    def __post_init__(self):
        draws = np.atleast_2d(np.asarray(self.draws, dtype=float))
        if draws.ndim != 2 or draws.shape[0] < 1:
            raise ValueError(f"draws must be an (N, d) array, got shape {draws.shape}")
        if not np.all(np.isfinite(draws)):
            raise ValueError("draws must be finite")
        self.draws = draws

    @property
    def n(self) -> int:
        return self.draws.shape[0]

    @property
    def dim(self) -> int:
        return self.draws.shape[1]


@dataclass
class RegressorConfig:
    """How to estimate E[u'X | P X]: 'knn' averaging or 'exact_linear' OLS."""

    method: str = "knn"
    k: int | None = None

    def __post_init__(self):
        if self.method not in ("knn", "exact_linear"):
            raise ValueError(f"unknown regression method {self.method!r}")
        if self.method == "knn" and self.k is not None and self.k < 1:
            raise ValueError("k must be at least 1")

    def resolve_k(self, n: int) -> int:
        k = self.k if self.k is not None else math.isqrt(n) + (math.isqrt(n) ** 2 < n)
        if k > n:
            raise ValueError(f"k={k} exceeds sample size {n}")
        return k


@dataclass
class IsotropyReport:
    """Per-step diagnostics emitted by the conjecture explorer."""

    step: int
    direction: np.ndarray
    anisotropy: float
    mean_norm: float
    mean_square_norm: float
    symmetry_stat: float
    mean_square_decrease: float
    regression_mean_square: float


@dataclass
class Theorem1Report:
    n: int
    delta: float
    inside_fraction: float
    chi_square: float
    chi_square_dof: int
    area_original: float
    area_symmetral: float
    area_rel_error: float


@dataclass
class NormReduction:
    before: float
    after: float
    decrease: float
    regression_mean_square: float


def complement_basis(u: np.ndarray) -> np.ndarray:
    """Deterministic orthonormal basis of u-perp, rows of a (d-1, d) array.

    Gram-Schmidt over the standard basis with the axis of largest |u|
    dropped; fixed convention so repeated runs agree bit for bit.
    """
    u = _check_unit(u)
    d = u.size
    drop = int(np.argmax(np.abs(u)))
    basis = [u]
    for i in range(d):
        if i == drop:
            continue
        v = np.zeros(d)
        v[i] = 1.0
        for w in basis:
            v -= (v @ w) * w
        norm = np.linalg.norm(v)
        v /= norm
        basis.append(v)
    return np.asarray(basis[1:])


def _conditional_mean(sample: EmpiricalSample, u: np.ndarray, cfg: RegressorConfig) -> np.ndarray:
    """Estimate m(p) = E[u'X | P X = p] at every draw."""
    if cfg.method == "knn":
        k = cfg.resolve_k(sample.n)  # validates k <= N up front
    y = sample.draws @ u
    if sample.dim == 1:
        return np.full(sample.n, y.mean())
    basis = complement_basis(u)
    p = sample.draws @ basis.T
    if np.ptp(p, axis=0).max() == 0.0:
        # degenerate projected coordinates: the conditional mean is global
        return np.full(sample.n, y.mean())
    if cfg.method == "exact_linear":
        p_centered = p - p.mean(axis=0)
        slope, *_ = np.linalg.lstsq(p_centered, y - y.mean(), rcond=None)
        return y.mean() + p_centered @ slope
    tree = cKDTree(p)
    _, idx = tree.query(p, k=k)
    if k == 1:
        idx = idx[:, None]
    return y[idx].mean(axis=1)


def symmetrize_sample(
    sample: EmpiricalSample, u, cfg: RegressorConfig | None = None
) -> EmpiricalSample:
    """Shift each draw along u by its estimated conditional mean.

    The coordinates in u-perp are left untouched; only the u-component
    moves, so the projected sample is conditioned on, never transported.
    """
    u = _check_unit(u)
    cfg = cfg or RegressorConfig()
    if u.size != sample.dim:
        raise ValueError(f"direction has dimension {u.size}, sample has {sample.dim}")
    m_hat = _conditional_mean(sample, u, cfg)
    return EmpiricalSample(sample.draws - m_hat[:, None] * u[None, :])


def polygon_steiner_symmetral_2d(poly: ConvexPolygon2D, u) -> ConvexPolygon2D:
    """Exact Steiner symmetral of a convex polygon in direction u.

    The chord length along u is a piecewise-linear concave function of the
    u-perp coordinate with breakpoints at vertex projections; the symmetral
    is the polygon bounded by +/- half that function, reflected-symmetric
    about the axis line and with the same area.
    """
    u = _check_unit(u)
    if u.size != 2:
        raise ValueError("polygon symmetrals are 2D only")
    w = np.array([u[1], -u[0]])  # right-handed (w, u) frame
    verts = poly.vertices
    t = verts @ w
    s = verts @ u
    span = float(t.max() - t.min())
    if span <= 0.0:
        raise DegeneratePolygonError("polygon projects to a point")
    breaks = np.unique(t)
    lower = np.empty(len(breaks))
    upper = np.empty(len(breaks))
    k = len(verts)
    for bi, tb in enumerate(breaks):
        s_hits = []
        for i in range(k):
            t0, s0 = t[i], s[i]
            t1, s1 = t[(i + 1) % k], s[(i + 1) % k]
            if t0 == t1:
                if t0 == tb:
                    s_hits.extend((s0, s1))
                continue
            lo, hi = (t0, t1) if t0 < t1 else (t1, t0)
            if lo <= tb <= hi:
                s_hits.append(s0 + (s1 - s0) * (tb - t0) / (t1 - t0))
        lower[bi] = min(s_hits)
        upper[bi] = max(s_hits)
    half = 0.5 * (upper - lower)
    chain = np.concatenate([np.column_stack([breaks, -half]),
                            np.column_stack([breaks[::-1], half[::-1]])])
    # drop the duplicated endpoints where the chord length vanishes
    keep = []
    for pt in chain:
        if keep and np.allclose(pt, keep[-1], rtol=0.0, atol=1e-15 * (1.0 + span)):
            continue
        keep.append(pt)
    if np.allclose(keep[0], keep[-1], rtol=0.0, atol=1e-15 * (1.0 + span)):
        keep.pop()
    frame = np.vstack([w, u])  # rows
    planar = np.asarray(keep) @ frame
    return ConvexPolygon2D(_prune_collinear(planar))


def sample_uniform_polygon(poly: ConvexPolygon2D, n: int, seed: int) -> EmpiricalSample:
    """Exact uniform draws on a convex polygon via fan triangulation."""
    if n < 1:
        raise ValueError("need at least one draw")
    verts = poly.vertices
    if polygon_area(verts) <= 0.0:
        raise DegeneratePolygonError("polygon has no area")
    anchor = verts[0]
    b = verts[1:-1] - anchor
    c = verts[2:] - anchor
    tri_areas = 0.5 * np.abs(b[:, 0] * c[:, 1] - b[:, 1] * c[:, 0])
    rng = np.random.default_rng(seed)
    which = rng.choice(len(tri_areas), size=n, p=tri_areas / tri_areas.sum())
    a1 = rng.random(n)
    a2 = rng.random(n)
    flip = a1 + a2 > 1.0
    a1[flip] = 1.0 - a1[flip]
    a2[flip] = 1.0 - a2[flip]
    pts = anchor + a1[:, None] * b[which] + a2[:, None] * c[which]
    return EmpiricalSample(pts)


def theorem1_check(
    poly: ConvexPolygon2D,
    u,
    n: int,
    cfg: RegressorConfig | None = None,
    seed: int = 0,
    delta: float | None = None,
    grid: int = 8,
) -> Theorem1Report:
    """Probe the classical-symmetral law on a uniform polygon sample.

    Draws uniformly on the polygon, symmetrizes the sample, and compares
    against the exact symmetral: the fraction of draws within ``delta`` of
    the symmetral (default 3 diam / sqrt(k)), a chi-square uniformity
    statistic over grid cells clipped to the symmetral, and the exact area
    match.  This reports; it does not assert.
    """
    u = _check_unit(u)
    cfg = cfg or RegressorConfig()
    sample = sample_uniform_polygon(poly, n, seed)
    symmetrized = symmetrize_sample(sample, u, cfg)
    symmetral = polygon_steiner_symmetral_2d(poly, u)
    if delta is None:
        k = cfg.resolve_k(n) if cfg.method == "knn" else n
        delta = 3.0 * poly.diameter / math.sqrt(k)
    dist = distances_to_polygon(symmetrized.draws, symmetral)
    inside_fraction = float(np.mean(dist <= delta))
    chi_square, dof = _chi_square_uniformity(symmetrized.draws, symmetral, grid)
    area_p = poly.area
    area_s = symmetral.area
    return Theorem1Report(
        n=n,
        delta=float(delta),
        inside_fraction=inside_fraction,
        chi_square=chi_square,
        chi_square_dof=dof,
        area_original=area_p,
        area_symmetral=area_s,
        area_rel_error=abs(area_s - area_p) / area_p,
    )


def _chi_square_uniformity(points: np.ndarray, poly: ConvexPolygon2D, grid: int):
    (xmin, xmax), (ymin, ymax) = poly.bounding_box()
    xs = np.linspace(xmin, xmax, grid + 1)
    ys = np.linspace(ymin, ymax, grid + 1)
    counts, _, _ = np.histogram2d(points[:, 0], points[:, 1], bins=[xs, ys])
    total_area = poly.area
    n = len(points)
    chi = 0.0
    dof = 0
    for i in range(grid):
        for jj in range(grid):
            cell = clip_polygon_to_rect(poly.vertices, xs[i], xs[i + 1], ys[jj], ys[jj + 1])
            expected = n * polygon_area(cell) / total_area
            if expected >= 5.0:
                chi += (counts[i, jj] - expected) ** 2 / expected
                dof += 1
    return float(chi), max(dof - 1, 0)


def norm_reduction_check(
    sample: EmpiricalSample, u, cfg: RegressorConfig | None = None
) -> NormReduction:
    """Mean-square norms before and after one symmetrization step.

    With OLS regression the decrease equals the empirical mean of the
    fitted conditional means squared (a least-squares identity); with knn
    the identity is approximate, so both sides are reported.
    """
    u = _check_unit(u)
    cfg = cfg or RegressorConfig()
    m_hat = _conditional_mean(sample, u, cfg)
    before = float(np.mean((sample.draws**2).sum(axis=1)))
    shifted = sample.draws - m_hat[:, None] * u[None, :]
    after = float(np.mean((shifted**2).sum(axis=1)))
    return NormReduction(
        before=before,
        after=after,
        decrease=before - after,
        regression_mean_square=float(np.mean(m_hat**2)),
    )


def _symmetry_statistic(draws: np.ndarray) -> float:
    """Max over probe directions of |mean(z | z>0) + mean(z | z<0)|, z = w'X."""
    d = draws.shape[1]
    probes = sphere_directions(d, 16 if d <= 2 else 32, seed=0)
    z = draws @ probes.T
    stat = 0.0
    for col in z.T:
        pos = col[col > 0.0]
        neg = col[col < 0.0]
        m_pos = pos.mean() if pos.size else 0.0
        m_neg = neg.mean() if neg.size else 0.0
        stat = max(stat, abs(m_pos + m_neg))
    return stat


def _isotropy_numbers(draws: np.ndarray) -> tuple[float, float, float]:
    cov = np.cov(draws, rowvar=False)
    cov = np.atleast_2d(cov)
    eigs = np.linalg.eigvalsh(cov)
    anisotropy = float(eigs[-1] / eigs[0]) if eigs[0] > 0.0 else math.inf
    mean_norm = float(np.linalg.norm(draws.mean(axis=0)))
    mean_square = float(np.mean((draws**2).sum(axis=1)))
    return anisotropy, mean_norm, mean_square


def conjecture_explorer(
    sample: EmpiricalSample,
    steps: int,
    direction_policy: str = "random_seeded",
    cfg: RegressorConfig | None = None,
    seed: int = 0,
) -> list[IsotropyReport]:
    """Apply repeated symmetrization steps and report isotropy diagnostics.

    Policies: 'random_seeded' draws a fresh uniform direction each step,
    'cyclic_axes' cycles the coordinate axes, 'max_anisotropy' bisects the
    extreme eigenvectors of the current sample covariance.  One report per
    step; the stream is an instrument, not a convergence claim.
    """
    if steps < 1:
        raise ValueError("need at least one step")
    if direction_policy not in ("random_seeded", "cyclic_axes", "max_anisotropy"):
        raise ValueError(f"unknown direction policy {direction_policy!r}")
    cfg = cfg or RegressorConfig()
    rng = np.random.default_rng(seed)
    d = sample.dim
    reports: list[IsotropyReport] = []
    for step in range(1, steps + 1):
        if direction_policy == "random_seeded":
            u = random_direction(rng, d)
        elif direction_policy == "cyclic_axes":
            u = np.zeros(d)
            u[(step - 1) % d] = 1.0
        else:
            if d == 1:
                u = np.array([1.0])
            else:
                cov = np.atleast_2d(np.cov(sample.draws, rowvar=False))
                _, v = _sorted_eigh(cov)
                u = v[:, 0] + v[:, -1]
                u /= np.linalg.norm(u)
        m_hat = _conditional_mean(sample, u, cfg)
        before_ms = float(np.mean((sample.draws**2).sum(axis=1)))
        sample = EmpiricalSample(sample.draws - m_hat[:, None] * u[None, :])
        anisotropy, mean_norm, mean_square = _isotropy_numbers(sample.draws)
        reports.append(
            IsotropyReport(
                step=step,
                direction=u.copy(),
                anisotropy=anisotropy,
                mean_norm=mean_norm,
                mean_square_norm=mean_square,
                symmetry_stat=_symmetry_statistic(sample.draws),
                mean_square_decrease=before_ms - mean_square,
                regression_mean_square=float(np.mean(m_hat**2)),
            )
        )
    return reports
