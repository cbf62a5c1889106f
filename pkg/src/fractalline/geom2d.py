"""Planar geometry kernel: convex hulls, convex-region predicates, line chords,
interval unions, outward polygon offsets.

All types are immutable values; all operations are pure functions. Containment
and incidence predicates use one global absolute tolerance (GEOM_TOL) suitable
for model-unit sized inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

# Absolute tolerance for containment / incidence predicates.
GEOM_TOL = 1e-9
# Snap tolerance for line incidence (chord endpoints are exact to this level).
SNAP_TOL = 1e-12

FULL = "full"
SEGMENT = "segment"
POINT = "point"


@dataclass(frozen=True)
class Point2:
    """A point of the plane. Coordinates must be finite."""

    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite coordinates: ({self.x}, {self.y})")

    def __iter__(self):
        yield self.x
        yield self.y

    def distance(self, other: "Point2") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)


@dataclass(frozen=True)
class AffineMap:
    """Invertible affine map z -> A z + t with A = [[a, b], [c, d]]."""

    a: float
    b: float
    c: float
    d: float
    tx: float
    ty: float

    @staticmethod
    def identity() -> "AffineMap":
        return AffineMap(1.0, 0.0, 0.0, 1.0, 0.0, 0.0)

    @property
    def det(self) -> float:
        return self.a * self.d - self.b * self.c

    @property
    def linear(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]])

    @property
    def translation(self) -> np.ndarray:
        return np.array([self.tx, self.ty])

    def apply(self, p: Point2) -> Point2:
        return Point2(self.a * p.x + self.b * p.y + self.tx,
                      self.c * p.x + self.d * p.y + self.ty)

    def apply_array(self, pts: np.ndarray) -> np.ndarray:
        return pts @ self.linear.T + self.translation

    def compose(self, other: "AffineMap") -> "AffineMap":
        """self after other: (self . other)(z) = self(other(z))."""
        a = self.a * other.a + self.b * other.c
        b = self.a * other.b + self.b * other.d
        c = self.c * other.a + self.d * other.c
        d = self.c * other.b + self.d * other.d
        tx = self.a * other.tx + self.b * other.ty + self.tx
        ty = self.c * other.tx + self.d * other.ty + self.ty
        return AffineMap(a, b, c, d, tx, ty)

    def inverse(self) -> "AffineMap":
        det = self.det
        if abs(det) < 1e-300:
            raise ValueError("affine map is singular")
        ia, ib, ic, id_ = self.d / det, -self.b / det, -self.c / det, self.a / det
        return AffineMap(ia, ib, ic, id_,
                         -(ia * self.tx + ib * self.ty),
                         -(ic * self.tx + id_ * self.ty))


@dataclass(frozen=True)
class Line:
    """Oriented line {z : a*x + b*y = c} with unit normal (a, b).

    The parametrization point(t) = anchor + t * direction uses
    anchor = c*(a, b) and direction = (-b, a); anchor is orthogonal to the
    direction, so the parameter of a point p is simply p . direction.
    """

    a: float
    b: float
    c: float

    def __post_init__(self):
        norm = math.hypot(self.a, self.b)
        if not math.isfinite(norm) or norm < 1e-12:
            raise ValueError("degenerate line: zero normal")
        if abs(norm - 1.0) > 1e-12:
            object.__setattr__(self, "a", self.a / norm)
            object.__setattr__(self, "b", self.b / norm)
            object.__setattr__(self, "c", self.c / norm)
        if not math.isfinite(self.c):
            raise ValueError("non-finite line offset")

    @staticmethod
    def from_points(p: Point2, q: Point2) -> "Line":
        dx, dy = q.x - p.x, q.y - p.y
        if math.hypot(dx, dy) < 1e-15:
            raise ValueError("coincident points do not define a line")
        return Line(-dy, dx, -dy * p.x + dx * p.y)

    @property
    def normal(self) -> tuple[float, float]:
        return (self.a, self.b)

    @property
    def direction(self) -> tuple[float, float]:
        return (-self.b, self.a)

    @property
    def anchor(self) -> Point2:
        return Point2(self.c * self.a, self.c * self.b)

    def point_at(self, t: float) -> Point2:
        return Point2(self.c * self.a - t * self.b, self.c * self.b + t * self.a)

    def signed_distance(self, p: Point2) -> float:
        return self.a * p.x + self.b * p.y - self.c

    def param_of(self, p: Point2) -> float:
        return -self.b * p.x + self.a * p.y

    def transformed(self, amap: AffineMap) -> "Line":
        """Image of this line under the (invertible) affine map."""
        inv = amap.inverse()
        # z on image  <=>  inv(z) on self  <=>  <A^-T n, z> = c + <n, inv.t>
        na = inv.a * self.a + inv.c * self.b
        nb = inv.b * self.a + inv.d * self.b
        cc = self.c - (inv.tx * self.a + inv.ty * self.b)
        return Line(na, nb, cc)


@dataclass(frozen=True)
class Interval:
    """Closed interval [lo, hi] with lo <= hi, in line-parameter units."""

    lo: float
    hi: float

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise ValueError("non-finite interval bounds")
        if self.lo > self.hi:
            raise ValueError(f"inverted interval [{self.lo}, {self.hi}]")

    @property
    def length(self) -> float:
        return self.hi - self.lo

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def contains(self, t: float, tol: float = 0.0) -> bool:
        return self.lo - tol <= t <= self.hi + tol


class IntervalSet:
    """Normalized union of intervals: sorted, pairwise disjoint (merged when
    touching), all non-empty as point sets."""

    __slots__ = ("intervals",)

    def __init__(self, intervals: Sequence[Interval] = ()):
        self.intervals: tuple[Interval, ...] = tuple(intervals)

    @staticmethod
    def from_intervals(items: Iterable[Interval]) -> "IntervalSet":
        parts = sorted(items, key=lambda iv: (iv.lo, iv.hi))
        merged: list[Interval] = []
        for iv in parts:
            if merged and iv.lo <= merged[-1].hi:
                if iv.hi > merged[-1].hi:
                    merged[-1] = Interval(merged[-1].lo, iv.hi)
            else:
                merged.append(iv)
        return IntervalSet(merged)

    @property
    def total_length(self) -> float:
        return sum(iv.length for iv in self.intervals)

    def __len__(self) -> int:
        return len(self.intervals)

    def __iter__(self):
        return iter(self.intervals)

    def contains(self, t: float, tol: float = 0.0) -> bool:
        return any(iv.contains(t, tol) for iv in self.intervals)

    def gaps_within(self, span: Interval, min_width: float = 0.0) -> list[Interval]:
        """Maximal sub-intervals of span not covered by this set."""
        gaps: list[Interval] = []
        cursor = span.lo
        for iv in self.intervals:
            if iv.hi < cursor:
                continue
            if iv.lo > span.hi:
                break
            if iv.lo > cursor:
                g = Interval(cursor, min(iv.lo, span.hi))
                if g.length > min_width:
                    gaps.append(g)
            cursor = max(cursor, iv.hi)
        if cursor < span.hi:
            g = Interval(cursor, span.hi)
            if g.length > min_width:
                gaps.append(g)
        return gaps


@dataclass(frozen=True)
class Disk:
    """Open disk used as a query region."""

    center: Point2
    radius: float

    def __post_init__(self):
        if self.radius < 0:
            raise ValueError("negative disk radius")

    def contains(self, p: Point2) -> bool:
        return self.center.distance(p) < self.radius

    def interior_margin(self, p: Point2) -> float:
        """Distance from p to the boundary, positive iff p is interior."""
        return self.radius - self.center.distance(p)


class ConvexPoly:
    """Convex region given by a CCW strictly-convex vertex chain.

    Degenerate inputs are tagged: a single point (POINT) or a collinear set
    (SEGMENT, stored as its two extreme points). Build instances through
    convex_hull(); the constructor trusts its input.
    """

    __slots__ = ("vertices", "tag", "_arr", "_normals", "_offsets", "_seglens")

    def __init__(self, vertices: Sequence[Point2], tag: str):
        self.vertices: tuple[Point2, ...] = tuple(vertices)
        self.tag = tag
        self._arr = np.array([(p.x, p.y) for p in self.vertices])
        if tag == FULL:
            rolled = np.roll(self._arr, -1, axis=0)
            edges = rolled - self._arr
            lens = np.hypot(edges[:, 0], edges[:, 1])
            normals = np.column_stack((edges[:, 1], -edges[:, 0])) / lens[:, None]
            self._normals = normals
            self._offsets = np.einsum("ij,ij->i", normals, self._arr)
            self._seglens = lens
        else:
            self._normals = None
            self._offsets = None
            self._seglens = None

    def __eq__(self, other) -> bool:
        return (isinstance(other, ConvexPoly) and self.tag == other.tag
                and self.vertices == other.vertices)

    def __repr__(self) -> str:
        return f"ConvexPoly({self.tag}, {len(self.vertices)} vertices)"

    @property
    def arr(self) -> np.ndarray:
        return self._arr

    @property
    def area(self) -> float:
        if self.tag != FULL:
            return 0.0
        x, y = self._arr[:, 0], self._arr[:, 1]
        return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))

    @property
    def diameter(self) -> float:
        if len(self.vertices) == 1:
            return 0.0
        d = self._arr[:, None, :] - self._arr[None, :, :]
        return float(np.sqrt((d * d).sum(axis=2)).max())

    def contains(self, p: Point2, tol: float = GEOM_TOL) -> bool:
        if self.tag == POINT:
            return self.vertices[0].distance(p) <= tol
        if self.tag == SEGMENT:
            return _point_segment_distance(p, self.vertices[0], self.vertices[1]) <= tol
        d = self._normals @ np.array([p.x, p.y]) - self._offsets
        return bool(d.max() <= tol)

    def contains_array(self, pts: np.ndarray, tol: float = GEOM_TOL) -> np.ndarray:
        if self.tag == POINT:
            d = pts - self._arr[0]
            return np.hypot(d[:, 0], d[:, 1]) <= tol
        if self.tag == SEGMENT:
            return _points_segment_distance(pts, self._arr[0], self._arr[1]) <= tol
        d = pts @ self._normals.T - self._offsets
        return d.max(axis=1) <= tol

    def distance_to(self, p: Point2) -> float:
        """Euclidean distance from p to this closed region (0 if inside)."""
        if self.tag == POINT:
            return self.vertices[0].distance(p)
        if self.tag == SEGMENT:
            return _point_segment_distance(p, self.vertices[0], self.vertices[1])
        q = np.array([p.x, p.y])
        if (self._normals @ q - self._offsets).max() <= 0.0:
            return 0.0
        rolled = np.roll(self._arr, -1, axis=0)
        best = math.inf
        for v0, v1 in zip(self._arr, rolled):
            best = min(best, _point_segment_distance(p, Point2(*v0), Point2(*v1)))
        return best

    def transformed(self, amap: AffineMap) -> "ConvexPoly":
        pts = amap.apply_array(self._arr)
        return convex_hull([Point2(float(x), float(y)) for x, y in pts])


def _point_segment_distance(p: Point2, a: Point2, b: Point2) -> float:
    ax, ay = a.x, a.y
    ex, ey = b.x - ax, b.y - ay
    L2 = ex * ex + ey * ey
    if L2 == 0.0:
        return p.distance(a)
    u = ((p.x - ax) * ex + (p.y - ay) * ey) / L2
    u = min(1.0, max(0.0, u))
    return math.hypot(p.x - (ax + u * ex), p.y - (ay + u * ey))


def _points_segment_distance(pts: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    e = b - a
    L2 = float(e @ e)
    if L2 == 0.0:
        d = pts - a
        return np.hypot(d[:, 0], d[:, 1])
    u = np.clip((pts - a) @ e / L2, 0.0, 1.0)
    proj = a + u[:, None] * e
    d = pts - proj
    return np.hypot(d[:, 0], d[:, 1])


def convex_hull(points: Sequence[Point2]) -> ConvexPoly:
    """Convex hull of a non-empty point set (monotone chain).

    Returns a CCW strictly-convex polygon; collinear inputs collapse to a
    SEGMENT and coincident inputs to a POINT. Every hull vertex is one of the
    input points.
    """
    if len(points) == 0:
        raise ValueError("empty point set")
    pts = sorted({(p.x, p.y) for p in points})
    if len(pts) == 1:
        return ConvexPoly([Point2(*pts[0])], POINT)

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower: list[tuple[float, float]] = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0.0:
            lower.pop()
        lower.append(p)
    upper: list[tuple[float, float]] = []
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0.0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    if len(hull) == 2:
        return ConvexPoly([Point2(*hull[0]), Point2(*hull[1])], SEGMENT)
    return ConvexPoly([Point2(*v) for v in hull], FULL)


def _poly_edges(poly: ConvexPoly) -> list[tuple[int, int]]:
    n = len(poly.vertices)
    if poly.tag == POINT:
        return []
    if poly.tag == SEGMENT:
        return [(0, 1)]
    return [(i, (i + 1) % n) for i in range(n)]


def line_poly_chord(line: Line, poly: ConvexPoly,
                    snap: float = SNAP_TOL) -> Optional[Interval]:
    """Parameter interval of line ∩ poly, or None when they miss.

    A touch at a single point yields a zero-length interval. Vertices within
    `snap` of the line count as incident, so endpoints are exact to that level.
    """
    arr = poly.arr
    nvec = np.array([line.a, line.b])
    dvec = np.array([-line.b, line.a])
    d = arr @ nvec - line.c
    ts = arr @ dvec
    hit: list[float] = [float(t) for t, di in zip(ts, d) if abs(di) <= snap]
    for i, j in _poly_edges(poly):
        di, dj = d[i], d[j]
        if (di > snap and dj < -snap) or (di < -snap and dj > snap):
            u = di / (di - dj)
            hit.append(float(ts[i] + u * (ts[j] - ts[i])))
    if not hit:
        return None
    return Interval(min(hit), max(hit))


def project_poly(poly: ConvexPoly, direction: tuple[float, float]) -> Interval:
    """Interval [min, max] of vertex dot products with a unit direction."""
    dx, dy = direction
    if abs(math.hypot(dx, dy) - 1.0) > GEOM_TOL:
        raise ValueError("direction must be a unit vector")
    dots = poly.arr @ np.array([dx, dy])
    return Interval(float(dots.min()), float(dots.max()))


def _sat_axes(poly: ConvexPoly) -> list[tuple[float, float]]:
    axes = []
    for i, j in _poly_edges(poly):
        vi, vj = poly.vertices[i], poly.vertices[j]
        ex, ey = vj.x - vi.x, vj.y - vi.y
        L = math.hypot(ex, ey)
        if L < 1e-300:
            continue
        axes.append((ey / L, -ex / L))
        axes.append((ex / L, ey / L))
    return axes


def polys_intersect(p1: ConvexPoly, p2: ConvexPoly, tol: float = GEOM_TOL) -> bool:
    """True iff the closed regions share a point (within tol).

    Separating-axis test over edge normals and edge directions of both
    polygons; touching at a single vertex counts as intersecting.
    """
    axes = _sat_axes(p1) + _sat_axes(p2)
    if not axes:
        # two degenerate points
        return p1.vertices[0].distance(p2.vertices[0]) <= tol
    ax = np.array(axes)
    pr1 = p1.arr @ ax.T
    pr2 = p2.arr @ ax.T
    gap = np.maximum(pr2.min(axis=0) - pr1.max(axis=0),
                     pr1.min(axis=0) - pr2.max(axis=0))
    return bool(gap.max() <= tol)


def _closest_pair(p1: ConvexPoly, p2: ConvexPoly) -> tuple[Point2, Point2, float]:
    """Closest points (q1 on p1, q2 on p2) between two convex polygons."""
    best = (p1.vertices[0], p2.vertices[0],
            p1.vertices[0].distance(p2.vertices[0]))

    def scan(verts_from: ConvexPoly, poly_to: ConvexPoly, flip: bool):
        nonlocal best
        edges = _poly_edges(poly_to)
        for v in verts_from.vertices:
            if not edges:
                cand, d = poly_to.vertices[0], v.distance(poly_to.vertices[0])
            else:
                cand, d = None, math.inf
                for i, j in edges:
                    a, b = poly_to.vertices[i], poly_to.vertices[j]
                    c = _closest_on_segment(v, a, b)
                    dd = v.distance(c)
                    if dd < d:
                        cand, d = c, dd
            if d < best[2]:
                best = (cand, v, d) if flip else (v, cand, d)

    scan(p1, p2, flip=False)
    scan(p2, p1, flip=True)
    return best


def _closest_on_segment(p: Point2, a: Point2, b: Point2) -> Point2:
    ex, ey = b.x - a.x, b.y - a.y
    L2 = ex * ex + ey * ey
    if L2 == 0.0:
        return a
    u = min(1.0, max(0.0, ((p.x - a.x) * ex + (p.y - a.y) * ey) / L2))
    return Point2(a.x + u * ex, a.y + u * ey)


def separating_line(p1: ConvexPoly, p2: ConvexPoly,
                    tol: float = GEOM_TOL) -> Optional[Line]:
    """A line strictly separating two disjoint convex regions (diagnostic).

    Returns None when the regions intersect. Otherwise the perpendicular
    bisector of the closest pair, which leaves all vertices of p1 and p2
    strictly on opposite sides.
    """
    if polys_intersect(p1, p2, tol):
        return None
    q1, q2, dist = _closest_pair(p1, p2)
    nx, ny = (q2.x - q1.x) / dist, (q2.y - q1.y) / dist
    mid = Point2(0.5 * (q1.x + q2.x), 0.5 * (q1.y + q2.y))
    return Line(nx, ny, nx * mid.x + ny * mid.y)


_OFFSET_STEP = 0.25  # max fan step (radians); overshoot 1/cos(step/2)-1 < 0.01


def poly_offset_outward(poly: ConvexPoly, r: float) -> ConvexPoly:
    """Polygon containing the Minkowski sum of poly with the disk of radius r.

    Vertex arcs are replaced by chords pushed outward to radius
    r / cos(step/2), so the result always covers the true sum and overshoots
    by at most 0.01*r in Hausdorff distance.
    """
    if r < 0:
        raise ValueError("negative offset radius")
    if r == 0.0:
        return poly
    r_out = r / math.cos(_OFFSET_STEP / 2.0)
    fans: list[tuple[Point2, float, float]] = []  # vertex, start angle, sweep
    if poly.tag == POINT:
        fans.append((poly.vertices[0], 0.0, 2.0 * math.pi))
    elif poly.tag == SEGMENT:
        a, b = poly.vertices
        phi = math.atan2(b.y - a.y, b.x - a.x)
        fans.append((b, phi - math.pi / 2.0, math.pi))
        fans.append((a, phi + math.pi / 2.0, math.pi))
    else:
        n = len(poly.vertices)
        angles = []
        for i in range(n):
            vi, vj = poly.vertices[i], poly.vertices[(i + 1) % n]
            angles.append(math.atan2(-(vj.x - vi.x), vj.y - vi.y))
        for i in range(n):
            a_in = angles[i - 1]
            a_out = angles[i]
            sweep = (a_out - a_in) % (2.0 * math.pi)
            fans.append((poly.vertices[i], a_in, sweep))
    pts: list[Point2] = []
    for v, start, sweep in fans:
        steps = max(1, math.ceil(sweep / _OFFSET_STEP))
        for k in range(steps + 1):
            phi = start + sweep * k / steps
            pts.append(Point2(v.x + r_out * math.cos(phi),
                              v.y + r_out * math.sin(phi)))
    return convex_hull(pts)


def hausdorff_convex(p1: ConvexPoly, p2: ConvexPoly) -> float:
    """Exact Hausdorff distance between two convex polygons.

    For convex sets the directed distance is attained at a vertex, so the
    maximum over vertex-to-region distances in both directions is exact.
    """
    d1 = max(p2.distance_to(v) for v in p1.vertices)
    d2 = max(p1.distance_to(v) for v in p2.vertices)
    return max(d1, d2)
