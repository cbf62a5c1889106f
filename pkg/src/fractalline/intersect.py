"""Certified chain / hyperdensity classification, the pruned fractal-line
intersection traversal, and constructions of approximate intersections.

Soundness conventions: pruning decisions test the line against images of the
OUTER hull only (supersets of the true pieces, so nothing on the line is ever
lost), while positive certificates are built from images of the INNER hull
only (genuine attractor subsets, so no false certificates).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np

from .geom2d import (ConvexPoly, Disk, Interval, IntervalSet, Line, Point2,
                     convex_hull, line_poly_chord, polys_intersect,
                     separating_line, SNAP_TOL)
from .hulls import HullPair, hull_pair
from .ifs import (Address, BudgetExceededError, Contraction, DEFAULT_BUDGET,
                  IFS, compose_address, invariant_ball, level_cloud)
from .measure import Slab

CHAIN = "chain"
NOT_HYPERDENSE = "not-hyperdense"
INDETERMINATE = "indeterminate"


@dataclass(frozen=True)
class Verdict:
    """Classification outcome; a negative always carries a checkable witness
    line that crosses the inner hull yet misses every outer piece."""

    kind: str
    witness: Optional[Line] = None
    reason: str = ""

    @staticmethod
    def chain() -> "Verdict":
        return Verdict(CHAIN)

    @staticmethod
    def not_hyperdense(witness: Line) -> "Verdict":
        return Verdict(NOT_HYPERDENSE, witness=witness)

    @staticmethod
    def indeterminate(reason: str) -> "Verdict":
        return Verdict(INDETERMINATE, reason=reason)


class RationalRotationError(RuntimeError):
    """The rotation orbit is finite and never meets the angular criterion."""


def _pieces(ifs: IFS, poly: ConvexPoly) -> list[ConvexPoly]:
    return [poly.transformed(m.affine()) for m in ifs.maps]


def _components(adjacent: list[list[bool]]) -> list[list[int]]:
    n = len(adjacent)
    seen = [False] * n
    comps = []
    for start in range(n):
        if seen[start]:
            continue
        comp, stack = [], [start]
        seen[start] = True
        while stack:
            i = stack.pop()
            comp.append(i)
            for j in range(n):
                if not seen[j] and adjacent[i][j]:
                    seen[j] = True
                    stack.append(j)
        comps.append(sorted(comp))
    return comps


def negative_certificate_valid(ifs: IFS, hulls: HullPair, line: Line) -> bool:
    """Check a non-hyperdensity witness: the line must meet the inner hull
    and miss every image of the outer hull."""
    if line_poly_chord(line, hulls.inner) is None:
        return False
    return all(line_poly_chord(line, piece) is None
               for piece in _pieces(ifs, hulls.outer))


def chain_certify(ifs: IFS, level: int = 8,
                  budget: int = DEFAULT_BUDGET) -> Verdict:
    """Certify the chain property or refute hyperdensity, from hull bounds.

    Touching images of the inner hull prove that the images of the true hull
    touch, so a connected inner-piece graph certifies the chain property. A
    disconnected outer-piece graph is turned into a witness line by separating
    component hulls; if no validated witness exists the result is
    indeterminate and a higher level may settle it.
    """
    hulls = hull_pair(ifs, level, budget)
    inner_pieces = _pieces(ifs, hulls.inner)
    n = ifs.n
    adj = [[i == j or polys_intersect(inner_pieces[i], inner_pieces[j])
            for j in range(n)] for i in range(n)]
    if len(_components(adj)) == 1:
        return Verdict.chain()

    outer_pieces = _pieces(ifs, hulls.outer)
    adj_out = [[i == j or polys_intersect(outer_pieces[i], outer_pieces[j])
                for j in range(n)] for i in range(n)]
    comps = _components(adj_out)
    if len(comps) > 1:
        for comp in comps:
            rest = [i for i in range(n) if i not in comp]
            g1 = convex_hull([v for i in comp for v in outer_pieces[i].vertices])
            g2 = convex_hull([v for i in rest for v in outer_pieces[i].vertices])
            witness = separating_line(g1, g2)
            if witness is not None and negative_certificate_valid(ifs, hulls, witness):
                return Verdict.not_hyperdense(witness)
        return Verdict.indeterminate(
            "outer pieces disconnected but no validated separating line; "
            "raise the hull level")
    return Verdict.indeterminate(
        "inner pieces disconnected while outer pieces still touch; "
        "raise the hull level")


def hyperdense_directional_test(ifs: IFS, level: int = 8, directions: int = 64,
                                budget: int = DEFAULT_BUDGET) -> Verdict:
    """Projection sweep over evenly spaced normals.

    If for some direction the outer-piece projections fail to cover the
    inner-hull projection, the uncovered offset gives a certified witness of
    non-hyperdensity. Covered directions only ever yield an indeterminate
    positive: finitely many directions cannot certify hyperdensity.
    """
    if directions < 4:
        raise ValueError("need at least 4 directions")
    hulls = hull_pair(ifs, level, budget)
    outer_pieces = _pieces(ifs, hulls.outer)
    inner_pieces = _pieces(ifs, hulls.inner)
    all_positive = True
    for i in range(directions):
        phi = math.pi * i / directions
        normal = (math.cos(phi), math.sin(phi))
        inner_span = _project(hulls.inner, normal)
        cover = IntervalSet.from_intervals(
            _project(piece, normal) for piece in outer_pieces)
        for gap in cover.gaps_within(inner_span, min_width=1e-9):
            witness = Line(normal[0], normal[1], gap.midpoint)
            if negative_certificate_valid(ifs, hulls, witness):
                return Verdict.not_hyperdense(witness)
        inner_cover = IntervalSet.from_intervals(
            _project(piece, normal) for piece in inner_pieces)
        if inner_cover.gaps_within(inner_span, min_width=1e-9):
            all_positive = False
    if all_positive:
        return Verdict.indeterminate(
            f"hyperdense on all {directions} tested directions "
            "(not a certificate)")
    return Verdict.indeterminate(
        f"no separating direction among {directions} tested; "
        "inner-piece coverage incomplete, raise the hull level")


def _project(poly: ConvexPoly, direction: tuple[float, float]) -> Interval:
    dots = poly.arr @ np.array(direction)
    return Interval(float(dots.min()), float(dots.max()))


@dataclass(frozen=True)
class Cover:
    """Epsilon-accurate parameter cover of all line-attractor intersections.

    Each piece is the parameter footprint of one surviving address-tree leaf
    (length < epsilon) with its witness address; interval_set is the
    normalized union and total_length its measure.
    """

    line: Line
    epsilon: float
    pieces: tuple[tuple[Interval, Address], ...]
    interval_set: IntervalSet
    total_length: float
    nodes_expanded: int

    @property
    def is_empty(self) -> bool:
        return not self.pieces


def line_intersect(ifs: IFS, hulls: HullPair, line: Line, epsilon: float,
                   budget: int = DEFAULT_BUDGET) -> Cover:
    """Depth-first pruned traversal of the address tree.

    A node is pruned when the line misses its image of the outer hull; it is
    emitted when the image's diameter bound (composed contraction factor times
    the outer-hull diameter) drops below epsilon; otherwise all intersecting
    children are explored. Every attractor point on the line has its parameter
    inside the emitted cover; for a chain fractal the cover is non-empty
    whenever the line meets the inner hull.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    verts = hulls.outer.arr
    base_diam = hulls.outer.diameter
    nvec = np.array([line.a, line.b])
    dvec = np.array([-line.b, line.a])
    affines = [(m.affine(), m.norm) for m in ifs.maps]
    lin = [am.linear for am, _ in affines]
    tr = [am.translation for am, _ in affines]

    pieces: list[tuple[Interval, Address]] = []
    nodes = 0
    stack: list[tuple[Address, np.ndarray, np.ndarray, float]] = [
        ((), np.eye(2), np.zeros(2), 1.0)]
    while stack:
        address, A, t, factor = stack.pop()
        nodes += 1
        if nodes > budget:
            err = BudgetExceededError(
                f"traversal expanded more than {budget} nodes; "
                "partial cover unusable", required=nodes, budget=budget)
            err.partial_pieces = tuple(pieces)
            raise err
        W = verts @ A.T + t
        d = W @ nvec - line.c
        if d.min() > SNAP_TOL or d.max() < -SNAP_TOL:
            continue
        if factor * base_diam < epsilon:
            ts = W @ dvec
            pieces.append((Interval(float(ts.min()), float(ts.max())), address))
            continue
        for k in range(ifs.n, 0, -1):
            i = k - 1
            stack.append((address + (k,), A @ lin[i], A @ tr[i] + t,
                          factor * affines[i][1]))
    interval_set = IntervalSet.from_intervals(iv for iv, _ in pieces)
    return Cover(line, epsilon, tuple(pieces), interval_set,
                 interval_set.total_length, nodes)


RegionLike = Union[Disk, Slab]


def proliferate(ifs: IFS, address: Address, region: RegionLike, count: int,
                primary: int = 1, reference: Optional[int] = None,
                budget: int = DEFAULT_BUDGET) -> list[Point2]:
    """Produce `count` distinct attractor points inside an open region around
    the finite-address point f = T_address(p_primary).

    The region is pulled back through the address map, a power T^k of the
    primary map is chosen so the whole attractor copy T^k(F) fits inside the
    pulled-back neighborhood, and distinct points of that copy are returned
    (images of a short-address cloud seeded at a different fixed point).
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    if not 1 <= primary <= ifs.n:
        raise ValueError("primary map index out of range")
    tmap = ifs.maps[primary - 1]
    amap, factor = compose_address(ifs, address)
    f = amap.apply(tmap.fixed)
    margin = region.interior_margin(f)
    if margin <= 0:
        raise ValueError("no interior witness: the address point is not "
                         "strictly inside the region")
    ball = invariant_ball(ifs)
    ref = _reference_index(ifs, primary, reference)
    if ref is None or ball.radius == 0.0:
        raise ValueError("attractor is a single point")
    q = ifs.maps[ref - 1].fixed

    back_radius = margin / factor
    k = 0
    while tmap.norm ** k * 2.0 * ball.radius >= back_radius:
        k += 1
        if k > 10_000:
            raise RuntimeError("containment depth search did not converge")
    power = amap
    for _ in range(k):
        power = power.compose(tmap.affine())

    depth = 0
    while ifs.n ** depth < count:
        depth += 1
    for _ in range(24):
        if ifs.n ** depth > budget:
            raise BudgetExceededError(
                f"proliferation depth {depth} needs {ifs.n ** depth} points; "
                f"budget is {budget}", required=ifs.n ** depth, budget=budget)
        cloud = power.apply_array(level_cloud(ifs, depth, seed=q, budget=budget))
        chosen: list[Point2] = []
        for x, y in cloud:
            p = Point2(float(x), float(y))
            if all(p.distance(c) > 1e-14 for c in chosen):
                chosen.append(p)
                if len(chosen) == count:
                    break
        if len(chosen) == count:
            bad = [p for p in chosen if region.interior_margin(p) <= 0]
            if bad:
                raise RuntimeError("constructed point escaped the region")
            return chosen
        depth += 1
    raise RuntimeError("could not find enough distinct points")


def _reference_index(ifs: IFS, primary: int, reference: Optional[int]) -> Optional[int]:
    p = ifs.maps[primary - 1].fixed
    if reference is not None:
        if not 1 <= reference <= ifs.n:
            raise ValueError("reference map index out of range")
        if ifs.maps[reference - 1].fixed.distance(p) <= 1e-12:
            raise ValueError("reference fixed point coincides with the center")
        return reference
    for k in range(1, ifs.n + 1):
        if k != primary and ifs.maps[k - 1].fixed.distance(p) > 1e-12:
            return k
    return None


def line_angle(line: Line, vx: float, vy: float) -> float:
    """Unsigned angle between a vector and the line's direction, in [0, pi/2];
    the zero vector counts as aligned."""
    dx, dy = line.direction
    cross = abs(dx * vy - dy * vx)
    dot = abs(dx * vx + dy * vy)
    if cross == 0.0 and dot == 0.0:
        return 0.0
    return math.atan2(cross, dot)


def angular_hits(ifs: IFS, map_index: int, address: Address, line: Line,
                 epsilon: float, count: int, reference: Optional[int] = None,
                 scan_limit: int = 10_000_000) -> list[tuple[int, Point2, float]]:
    """First `count` rotation indices whose iterate enters the epsilon angular
    neighborhood of the line around f = T_address(p).

    p is the fixed point of the rotating similitude `map_index`; the line must
    pass through f. Iterates of a reference attractor point spiral around p;
    an index k qualifies when ((k*theta + alpha) - beta) mod 2pi < epsilon in
    the pulled-back frame. A rotation angle commensurate with 2pi whose finite
    orbit never qualifies raises RationalRotationError.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if count < 1:
        raise ValueError("count must be >= 1")
    if not 1 <= map_index <= ifs.n:
        raise ValueError("map index out of range")
    tmap = ifs.maps[map_index - 1]
    if not tmap.is_similitude:
        raise ValueError("angular construction requires a similitude map")
    if not all(ifs.maps[i - 1].is_similitude for i in address):
        raise ValueError("angular construction requires a similitude address")
    p = tmap.fixed
    amap, _ = compose_address(ifs, address)
    f = amap.apply(p)
    if abs(line.signed_distance(f)) > 1e-9:
        raise ValueError("the address point does not lie on the line")

    ref = _reference_index(ifs, map_index, reference)
    if ref is None:
        raise ValueError("attractor is a single point")
    q = ifs.maps[ref - 1].fixed
    alpha = math.atan2(q.y - p.y, q.x - p.x)
    inv = amap.inverse()
    dx, dy = line.direction
    bdir = inv.linear @ np.array([dx, dy])
    beta = math.atan2(float(bdir[1]), float(bdir[0]))
    theta = tmap.angle or 0.0
    two_pi = 2.0 * math.pi

    ratio = theta / two_pi
    approx = Fraction(ratio).limit_denominator(1024)
    if abs(ratio - float(approx)) < 1e-12:
        period = approx.denominator
        if not any(_residue(k, theta, alpha, beta) < epsilon
                   for k in range(1, period + 1)):
            raise RationalRotationError(
                f"rational rotation: finite angular orbit (period {period}) "
                "never enters the neighborhood")

    radial0 = q.distance(p)
    lin = amap.linear
    hits: list[tuple[int, Point2, float]] = []
    for k in range(1, scan_limit + 1):
        res = _residue(k, theta, alpha, beta)
        if res < epsilon:
            rad = tmap.ratio ** k * radial0
            ang = k * theta + alpha
            w = np.array([rad * math.cos(ang), rad * math.sin(ang)])
            delta = lin @ w
            point = Point2(f.x + float(delta[0]), f.y + float(delta[1]))
            measured = line_angle(line, float(delta[0]), float(delta[1]))
            if measured >= epsilon + 1e-9:
                raise RuntimeError("angular verification failed")
            hits.append((k, point, measured))
            if len(hits) == count:
                return hits
    raise RuntimeError(f"scan limit {scan_limit} exceeded before "
                       f"{count} angular hits were found")


def _residue(k: int, theta: float, alpha: float, beta: float) -> float:
    r = math.fmod(k * theta + alpha - beta, 2.0 * math.pi)
    return r + 2.0 * math.pi if r < 0 else r
