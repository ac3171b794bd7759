"""Shared builders for randomized test instances."""

from __future__ import annotations

import numpy as np

from zonomed import PointCloud, Zonotope, grid_oracle


def random_zonotope(rng: np.random.Generator, d: int, m: int) -> Zonotope:
    return Zonotope(rng.standard_normal((m, d)))


def random_spd(rng: np.random.Generator, d: int, lo: float = 0.5, hi: float = 5.0):
    """Random SPD matrix with eigenvalues uniform in [lo, hi]; returns (cov, eigs)."""
    q, _ = np.linalg.qr(rng.standard_normal((d, d)))
    eigs = np.sort(rng.uniform(lo, hi, size=d))
    return (q * eigs) @ q.T, eigs


def rotation_matrix(rng: np.random.Generator, d: int) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((d, d)))
    q *= np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def refined_grid_minimum(
    cloud: PointCloud,
    objective,
    cell_target: float = 1e-3,
    resolution: int = 13,
    pad: float = 0.15,
    beam: int = 10,
):
    """Zooming grid search down to the requested cell size.

    Two safeguards keep shallow, narrow valleys from escaping the window:
    the window grows whenever the level's best point touches its boundary
    layer, and the next window is the padded bounding box of the ``beam``
    best grid points rather than a box around a single incumbent.  The
    final level goes through grid_oracle itself.  Returns (point, value,
    cell_diagonal) of the final, finest grid.
    """
    import itertools as _it

    pts = cloud.points
    d = cloud.dim
    lo = pts.min(axis=0)
    hi = pts.max(axis=0)
    span = np.maximum(hi - lo, 1e-3)
    lo = lo - pad * span
    hi = hi + pad * span

    def evaluate(lo_, hi_):
        axes = [np.linspace(lo_[i], hi_[i], resolution) for i in range(d)]
        grid = np.asarray(list(_it.product(*axes)))
        values = np.asarray([objective(x) for x in grid])
        return grid, values

    for _ in range(120):
        cell = (hi - lo) / (resolution - 1)
        if cell.max() <= cell_target:
            bounds = np.column_stack([lo, hi])
            point, value = grid_oracle(cloud, objective, bounds, resolution)
            return point, value, float(np.linalg.norm(cell))
        grid, values = evaluate(lo, hi)
        top = grid[np.argsort(values, kind="stable")[:beam]]
        best = top[0]
        new_lo = top.min(axis=0) - 2.0 * cell
        new_hi = top.max(axis=0) + 2.0 * cell
        # force geometric progress: trim an over-wide beam box around the best
        for axis in range(d):
            limit = 0.75 * (hi[axis] - lo[axis])
            if new_hi[axis] - new_lo[axis] > limit:
                new_lo[axis] = max(new_lo[axis], best[axis] - 0.5 * limit)
                new_hi[axis] = new_lo[axis] + limit
        lo, hi = new_lo, new_hi
    raise RuntimeError("grid refinement failed to reach the target cell size")


def grid_value_band(objective, point: np.ndarray, radius: float) -> float:
    """Largest axis-step objective variation around a grid point.

    This is the value resolution of a grid with the given step: two
    candidate minimizers whose values differ by less than this band cannot
    be told apart by that grid.
    """
    base = objective(point)
    band = 0.0
    d = point.size
    for axis in range(d):
        for sign in (-1.0, 1.0):
            probe = point.copy()
            probe[axis] += sign * radius
            band = max(band, abs(objective(probe) - base))
    return band
