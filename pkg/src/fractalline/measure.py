"""Finite-level invariant-measure evaluation and shadow density profiles.

nu_level(S) sums the weight of every address of a fixed length whose image of
the seed point lands in S. The level is explicit: the value is exact for the
truncated measure and converges to the invariant measure as the level grows.
Containment at region boundaries is closed-set with a 1e-12 slack.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .geom2d import ConvexPoly, Interval, Line, Point2, project_poly
from .hulls import outer_hull
from .ifs import Contraction, DEFAULT_BUDGET, IFS, weighted_cloud

MEASURE_TOL = 1e-12


def _line_preimage(line: Line, contraction: Contraction) -> Line:
    """Preimage of a line under a contraction (any invertible affine map)."""
    amap = contraction.affine()
    # z in preimage <=> amap(z) on line <=> <M^T n, z> = c - <n, t>
    na = amap.a * line.a + amap.c * line.b
    nb = amap.b * line.a + amap.d * line.b
    cc = line.c - (amap.tx * line.a + amap.ty * line.b)
    return Line(na, nb, cc)


@dataclass(frozen=True)
class HalfPlane:
    """Closed half-plane {z : a*x + b*y <= c} with unit normal (a, b)."""

    a: float
    b: float
    c: float

    def __post_init__(self):
        norm = math.hypot(self.a, self.b)
        if norm < 1e-12:
            raise ValueError("degenerate half-plane normal")
        if abs(norm - 1.0) > 1e-12:
            object.__setattr__(self, "a", self.a / norm)
            object.__setattr__(self, "b", self.b / norm)
            object.__setattr__(self, "c", self.c / norm)

    def contains(self, p: Point2, tol: float = MEASURE_TOL) -> bool:
        return self.a * p.x + self.b * p.y <= self.c + tol

    def contains_array(self, pts: np.ndarray, tol: float = MEASURE_TOL) -> np.ndarray:
        return pts @ np.array([self.a, self.b]) <= self.c + tol

    def preimage(self, contraction: Contraction) -> "HalfPlane":
        amap = contraction.affine()
        na = amap.a * self.a + amap.c * self.b
        nb = amap.b * self.a + amap.d * self.b
        cc = self.c - (amap.tx * self.a + amap.ty * self.b)
        return HalfPlane(na, nb, cc)


@dataclass(frozen=True)
class ConvexRegion:
    """A convex polygon (possibly degenerate) as a query region."""

    poly: ConvexPoly

    def contains(self, p: Point2, tol: float = MEASURE_TOL) -> bool:
        return self.poly.contains(p, tol)

    def contains_array(self, pts: np.ndarray, tol: float = MEASURE_TOL) -> np.ndarray:
        return self.poly.contains_array(pts, tol)

    def preimage(self, contraction: Contraction) -> "ConvexRegion":
        inv = contraction.affine().inverse()
        return ConvexRegion(self.poly.transformed(inv))


@dataclass(frozen=True)
class Slab:
    """Points within `half_width` of a line (a translational neighborhood)."""

    line: Line
    half_width: float

    def __post_init__(self):
        if not self.half_width > 0:
            raise ValueError("slab half-width must be positive")

    def contains(self, p: Point2, tol: float = MEASURE_TOL) -> bool:
        return abs(self.line.signed_distance(p)) <= self.half_width + tol

    def contains_array(self, pts: np.ndarray, tol: float = MEASURE_TOL) -> np.ndarray:
        d = pts @ np.array([self.line.a, self.line.b]) - self.line.c
        return np.abs(d) <= self.half_width + tol

    def interior_margin(self, p: Point2) -> float:
        return self.half_width - abs(self.line.signed_distance(p))

    def preimage(self, contraction: Contraction) -> "Slab":
        if not contraction.is_similitude:
            raise ValueError("preimage not shape-closed: slab needs a similitude")
        return Slab(_line_preimage(self.line, contraction),
                    self.half_width / contraction.ratio)


@dataclass(frozen=True)
class AngularSector:
    """Points whose direction from `apex` is within `half_angle` of a line
    (an angular neighborhood; the apex itself is included)."""

    apex: Point2
    line: Line
    half_angle: float

    def __post_init__(self):
        if not 0.0 < self.half_angle <= math.pi / 2:
            raise ValueError("sector half-angle must be in (0, pi/2]")

    def _angles(self, pts: np.ndarray) -> np.ndarray:
        v = pts - np.array([self.apex.x, self.apex.y])
        dx, dy = self.line.direction
        cross = np.abs(dx * v[:, 1] - dy * v[:, 0])
        dot = np.abs(dx * v[:, 0] + dy * v[:, 1])
        return np.arctan2(cross, dot)

    def contains(self, p: Point2, tol: float = MEASURE_TOL) -> bool:
        return bool(self.contains_array(np.array([[p.x, p.y]]), tol)[0])

    def contains_array(self, pts: np.ndarray, tol: float = MEASURE_TOL) -> np.ndarray:
        v = pts - np.array([self.apex.x, self.apex.y])
        at_apex = np.hypot(v[:, 0], v[:, 1]) <= tol
        return at_apex | (self._angles(pts) <= self.half_angle + tol)

    def preimage(self, contraction: Contraction) -> "AngularSector":
        if not contraction.is_similitude:
            raise ValueError("preimage not shape-closed: sector needs a similitude")
        inv = contraction.affine().inverse()
        return AngularSector(inv.apply(self.apex),
                             _line_preimage(self.line, contraction),
                             self.half_angle)


Region = Union[HalfPlane, ConvexRegion, Slab, AngularSector]


def nu_level(ifs: IFS, level: int, region: Region,
             seed: Optional[Point2] = None,
             budget: int = DEFAULT_BUDGET) -> float:
    """Mass of the level-truncated invariant measure on a region.

    Sums address weights over all addresses of the given length whose image
    of the seed point (default: first fixed point) lies in the region. The
    summation order is fixed (lexicographic addresses), so the result is
    bit-identical across runs.
    """
    pts, wts = weighted_cloud(ifs, level, seed, budget)
    mask = region.contains_array(pts)
    return float(np.add.reduce(wts[mask]))


def invariance_residual(ifs: IFS, level: int, region: Region,
                        seed: Optional[Point2] = None,
                        budget: int = DEFAULT_BUDGET) -> float:
    """|nu_L(S) - sum_k w_k nu_{L-1}(T_k^{-1}(S))|, an exact identity at
    finite level up to floating-point regrouping."""
    if level < 1:
        raise ValueError("level must be >= 1 for the recursion")
    lhs = nu_level(ifs, level, region, seed, budget)
    rhs = math.fsum(w * nu_level(ifs, level - 1, region.preimage(m), seed, budget)
                    for w, m in zip(ifs.weights, ifs.maps))
    return abs(lhs - rhs)


@dataclass(frozen=True)
class ShadowProfile:
    """Mass per parallel ray slab across the attractor in one direction.

    Rays are normal-offset parametrized: offset j holds the mass of the slab
    of half-width spacing/2 centered on ray j. The slabs tile the projection
    span, so the masses are a probability partition; points landing exactly
    on a slab edge (within 1e-12) contribute half to each side.
    """

    theta: float
    level: int
    spacing: float
    offsets: np.ndarray
    masses: np.ndarray

    def rows(self) -> list[tuple[float, float]]:
        return [(float(o), float(m)) for o, m in zip(self.offsets, self.masses)]


def shadow_profile(ifs: IFS, theta: float, level: int,
                   seed: Optional[Point2] = None,
                   hull_level: int = 8,
                   budget: int = DEFAULT_BUDGET) -> ShadowProfile:
    """Ray-absorption density in direction theta.

    theta = 0 gives vertical rays with offsets along x; the ray normal is
    (cos theta, sin theta). Spacing is lambda_min^level * diam(fixed points);
    the ray grid is centered on the outer-hull projection span and has an odd
    ray count so symmetric attractors produce symmetric grids.
    """
    spacing = ifs.lambda_min ** level * ifs.diam_fixed_points
    if spacing <= 0.0:
        raise ValueError("ray spacing is zero: coincident fixed points")
    normal = (math.cos(theta), math.sin(theta))
    span = project_poly(outer_hull(ifs, hull_level, budget), normal)
    count = max(1, math.ceil(span.length / spacing))
    if count % 2 == 0:
        count += 1
    half = (count - 1) // 2
    mid = span.midpoint
    offsets = mid + (np.arange(count) - half) * spacing

    pts, wts = weighted_cloud(ifs, level, seed, budget)
    u = (pts @ np.array(normal) - mid) / spacing
    edge_tol = MEASURE_TOL / spacing
    lo = np.floor(u + 0.5 - edge_tol).astype(int) + half
    hi = np.floor(u + 0.5 + edge_tol).astype(int) + half
    lo = np.clip(lo, 0, count - 1)
    hi = np.clip(hi, 0, count - 1)
    masses = np.zeros(count)
    whole = lo == hi
    np.add.at(masses, lo[whole], wts[whole])
    split = ~whole
    np.add.at(masses, lo[split], 0.5 * wts[split])
    np.add.at(masses, hi[split], 0.5 * wts[split])
    return ShadowProfile(theta, level, spacing, offsets, masses)
