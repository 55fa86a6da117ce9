"""Exact 1D Wasserstein-1 distances and their sliced extension to phase space.

The 1D distance between weighted particle sets uses the order-statistics
identity W1 = int |F_mu - F_nu| dz, computed exactly by sweeping the merged
support.  sliced_w1 averages 1D distances of projections onto a fixed set of
unit directions (deterministic seed), which metrizes weak convergence on the
bounded phase-space windows used here.
"""

from __future__ import annotations

import warnings

import numpy as np

from .grid import UniformGrid

SLICE_SEED = 63_841_297
N_DIRECTIONS = 64


def slice_directions(k: int = N_DIRECTIONS) -> np.ndarray:
    """k fixed unit directions in the (x, p) plane, reproducible across runs."""
    rng = np.random.default_rng(SLICE_SEED)
    theta = rng.uniform(0.0, np.pi, size=k)
    return np.column_stack([np.cos(theta), np.sin(theta)])


def w1_weighted(
    z1: np.ndarray, w1: np.ndarray, z2: np.ndarray, w2: np.ndarray
) -> float:
    """Exact W1 between two weighted 1D particle measures of equal mass.

    Weights are normalized internally; the result is scaled back by the
    common mass.
    """
    z1 = np.asarray(z1, dtype=float)
    z2 = np.asarray(z2, dtype=float)
    w1 = np.asarray(w1, dtype=float)
    w2 = np.asarray(w2, dtype=float)
    if z1.size == 0 or z2.size == 0:
        raise ValueError("cannot compute a distance involving an empty measure")
    m1 = float(w1.sum())
    m2 = float(w2.sum())
    if m1 <= 0 or m2 <= 0:
        raise ValueError("measures must carry positive mass")

    z = np.concatenate([z1, z2])
    s = np.concatenate([w1 / m1, -w2 / m2])
    order = np.argsort(z, kind="stable")
    z = z[order]
    cdf_diff = np.cumsum(s[order])[:-1]
    return float(np.sum(np.abs(cdf_diff) * np.diff(z))) * m1


def sliced_w1(
    xp1: np.ndarray,
    w1: np.ndarray,
    xp2: np.ndarray,
    w2: np.ndarray,
    n_directions: int = N_DIRECTIONS,
    mass_tol: float = 1e-6,
) -> float:
    """Average of exact 1D W1 over fixed projection directions.

    Preconditions: equal total mass to ``mass_tol``; otherwise the second
    measure is rescaled and a warning is emitted.
    """
    xp1 = np.asarray(xp1, dtype=float)
    xp2 = np.asarray(xp2, dtype=float)
    w1 = np.asarray(w1, dtype=float)
    w2 = np.asarray(w2, dtype=float).copy()
    if xp1.size == 0 or xp2.size == 0:
        raise ValueError("cannot compute a distance involving an empty measure")
    m1 = float(w1.sum())
    m2 = float(w2.sum())
    if abs(m1 - m2) > mass_tol * max(m1, m2):
        warnings.warn(
            f"measure masses differ ({m1:.6g} vs {m2:.6g}); rescaling the second",
            stacklevel=2,
        )
    w2 *= m1 / m2

    dirs = slice_directions(n_directions)
    proj1 = xp1 @ dirs.T   # (N1, k)
    proj2 = xp2 @ dirs.T
    total = 0.0
    for j in range(dirs.shape[0]):
        total += w1_weighted(proj1[:, j], w1, proj2[:, j], w2)
    return total / dirs.shape[0]


def _abs_linear_integral(d0: np.ndarray, d1: np.ndarray, h: np.ndarray) -> float:
    """int |d(s)| over segments where d goes linearly from d0 to d1 over width h."""
    same_sign = d0 * d1 >= 0.0
    contrib = np.where(
        same_sign,
        0.5 * (np.abs(d0) + np.abs(d1)) * h,
        0.5 * h * (d0**2 + d1**2) / np.maximum(np.abs(d1 - d0), 1e-300),
    )
    return float(np.sum(contrib))


def _level_median(d0: np.ndarray, d1: np.ndarray, h: np.ndarray) -> float:
    """Level c such that the length where the piecewise-linear d exceeds c
    equals the length where it stays below (minimizer of int |d - c|)."""
    lo = float(min(d0.min(), d1.min()))
    hi = float(max(d0.max(), d1.max()))
    if hi - lo < 1e-15:
        return 0.5 * (lo + hi)
    total = float(h.sum())

    def length_above(c: float) -> float:
        top = np.maximum(d0, d1)
        bot = np.minimum(d0, d1)
        frac = np.clip((top - c) / np.maximum(top - bot, 1e-300), 0.0, 1.0)
        frac = np.where(top <= c, 0.0, np.where(bot >= c, 1.0, frac))
        return float(np.sum(frac * h))

    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if length_above(mid) > 0.5 * total:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def w1_points_vs_density(
    points: np.ndarray,
    weights: np.ndarray,
    grid: UniformGrid,
    rho: np.ndarray,
    periodic: bool = True,
) -> float:
    """Exact W1 between a weighted particle set and a grid density.

    The density is piecewise constant over cells centered on the grid nodes
    (CDF piecewise linear); both measures are normalized to unit mass.  With
    ``periodic`` the distance is taken on the circle by minimizing over the
    constant CDF offset, which coincides with the line distance for
    interior-supported states.
    """
    points = np.asarray(points, dtype=float)
    weights = np.asarray(weights, dtype=float)
    rho = np.asarray(rho, dtype=float)
    wsum = float(weights.sum())
    rho_mass = float(rho.sum()) * grid.dx
    if wsum <= 0 or rho_mass <= 0:
        raise ValueError("measures must carry positive mass")

    edges = grid.x_min - 0.5 * grid.dx + grid.dx * np.arange(grid.n + 1)
    cdf_rho_edges = np.concatenate([[0.0], np.cumsum(rho) * grid.dx]) / rho_mass
    if periodic:
        # wrap particles into the edge-aligned window so both CDFs share a start
        points = edges[0] + np.mod(points - edges[0], grid.length)

    order = np.argsort(points, kind="stable")
    pts = points[order]
    pw = weights[order] / wsum
    cdf_emp_at = np.cumsum(pw)

    # merged breakpoints: cell edges and particle positions
    z = np.concatenate([edges, pts])
    kind = np.concatenate([np.zeros(edges.size, dtype=int), np.ones(pts.size, dtype=int)])
    perm = np.argsort(z, kind="stable")
    z = z[perm]
    kind = kind[perm]

    # empirical CDF immediately after each breakpoint
    emp_idx = np.cumsum(kind) - 1
    cdf_emp = np.where(emp_idx >= 0, cdf_emp_at[np.maximum(emp_idx, 0)], 0.0)

    # density CDF at the breakpoints (linear within cells, clamped outside)
    cdf_rho = np.interp(z, edges, cdf_rho_edges)

    h = np.diff(z)
    d0 = cdf_rho[:-1] - cdf_emp[:-1]
    d1 = cdf_rho[1:] - cdf_emp[:-1]
    if periodic:
        c = _level_median(d0, d1, h)
        return _abs_linear_integral(d0 - c, d1 - c, h)
    return _abs_linear_integral(d0, d1, h)
