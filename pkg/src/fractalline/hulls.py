"""Certified inner and outer convex-hull approximations of an IFS attractor.

The outer hull at level m is the hull of all level-m images of the invariant
ball center, inflated by lambda_max^m * ball radius: a guaranteed superset of
the attractor hull. The inner hull is the hull of level-m images of the fixed
points: genuine attractor points, hence a guaranteed subset. Pruning must use
only the outer hull; certification of positive facts only the inner one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import geom2d
from .geom2d import ConvexPoly, Point2, convex_hull, hausdorff_convex, poly_offset_outward
from .ifs import DEFAULT_BUDGET, IFS, _check_budget, invariant_ball, level_cloud

MAX_HULL_VERTICES = 256


@dataclass(frozen=True)
class HullPair:
    """Outer/inner hull bounds with the analytic error bound
    lambda_max^level * invariant radius and the measured Hausdorff gap."""

    outer: ConvexPoly
    inner: ConvexPoly
    level: int
    error_bound: float
    measured_gap: float


def _cloud_points(arr: np.ndarray) -> list[Point2]:
    return [Point2(float(x), float(y)) for x, y in arr]


def outer_hull(ifs: IFS, level: int, budget: int = DEFAULT_BUDGET) -> ConvexPoly:
    """Convex superset of the attractor hull at refinement `level`."""
    ball = invariant_ball(ifs)
    cloud = level_cloud(ifs, level, seed=ball.center, budget=budget)
    hull = convex_hull(_cloud_points(cloud))
    inflated = poly_offset_outward(hull, ifs.lambda_max ** level * ball.radius)
    return _decimate(inflated)


def inner_hull(ifs: IFS, level: int, budget: int = DEFAULT_BUDGET) -> ConvexPoly:
    """Convex subset of the attractor hull: hull of level-`level` images of
    every fixed point. Each vertex is an exact attractor point."""
    _check_budget(ifs, level, budget, seeds=ifs.n)
    pts = []
    for m in ifs.maps:
        pts.append(level_cloud(ifs, level, seed=m.fixed, budget=budget))
    return convex_hull(_cloud_points(np.concatenate(pts, axis=0)))


def hull_pair(ifs: IFS, level: int, budget: int = DEFAULT_BUDGET) -> HullPair:
    outer = outer_hull(ifs, level, budget)
    inner = inner_hull(ifs, level, budget)
    ball = invariant_ball(ifs)
    bound = ifs.lambda_max ** level * ball.radius
    gap = hausdorff_convex(outer, inner)
    return HullPair(outer, inner, level, bound, gap)


def _decimate(poly: ConvexPoly) -> ConvexPoly:
    """Reduce the vertex count by intersecting supporting half-planes at
    evenly spaced angles. Only ever moves the boundary outward; falls back to
    the original polygon if the circumscribed candidate fails verification."""
    if poly.tag != geom2d.FULL or len(poly.vertices) <= MAX_HULL_VERTICES:
        return poly
    k = MAX_HULL_VERTICES
    angles = 2.0 * math.pi * np.arange(k) / k
    dirs = np.column_stack((np.cos(angles), np.sin(angles)))
    support = (poly.arr @ dirs.T).max(axis=0)
    pts = []
    for i in range(k):
        j = (i + 1) % k
        a1, b1, c1 = dirs[i, 0], dirs[i, 1], support[i]
        a2, b2, c2 = dirs[j, 0], dirs[j, 1], support[j]
        det = a1 * b2 - a2 * b1
        pts.append(Point2((c1 * b2 - c2 * b1) / det, (a1 * c2 - a2 * c1) / det))
    candidate = convex_hull(pts)
    inside = candidate.contains_array(poly.arr, tol=geom2d.GEOM_TOL)
    if not bool(inside.all()):
        return poly
    return candidate
