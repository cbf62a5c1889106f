"""Iterated function systems on the plane: contraction maps, validation,
address machinery, point-cloud generation, similarity dimension.

An address is a plain tuple of 1-based map indices; the empty tuple denotes
the identity. Address enumeration is always lexicographic with the first
index most significant, which makes every derived output deterministic.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .geom2d import AffineMap, Disk, Point2

Address = tuple[int, ...]

DEFAULT_BUDGET = 10_000_000

Matrix = tuple[tuple[float, float], tuple[float, float]]


class BudgetExceededError(RuntimeError):
    """An enumeration or traversal would exceed its configured budget."""

    def __init__(self, message: str, required: int, budget: int):
        super().__init__(message)
        self.required = required
        self.budget = budget


def _spectral_norm(m: Matrix) -> float:
    # largest singular value of a 2x2 matrix, from the characteristic
    # polynomial of M^T M
    (a, b), (c, d) = m
    frob2 = a * a + b * b + c * c + d * d
    det = a * d - b * c
    disc = max(0.0, frob2 * frob2 - 4.0 * det * det)
    return math.sqrt(0.5 * (frob2 + math.sqrt(disc)))


def _detect_similitude(m: Matrix) -> tuple[Optional[float], Optional[float]]:
    """Recover (ratio, angle) when m is a rotation scaled by ratio in (0,1)."""
    (a, b), (c, d) = m
    if abs(a - d) <= 1e-12 and abs(b + c) <= 1e-12:
        lam = math.hypot(a, c)
        if lam > 1e-12:
            return lam, math.atan2(c, a)
    return None, None


@dataclass(frozen=True)
class Contraction:
    """Affine map z -> fixed + M (z - fixed); `fixed` is its fixed point.

    The spectral norm of M is cached at construction. Contractivity and
    invertibility are reported by validate() rather than enforced here, so
    invalid inputs can be diagnosed.
    """

    fixed: Point2
    matrix: Matrix
    ratio: Optional[float] = None
    angle: Optional[float] = None
    norm: float = field(init=False)

    def __post_init__(self):
        flat = [x for row in self.matrix for x in row]
        if len(self.matrix) != 2 or any(len(row) != 2 for row in self.matrix):
            raise ValueError("matrix must be 2x2")
        if not all(math.isfinite(x) for x in flat):
            raise ValueError("non-finite matrix entry")
        object.__setattr__(self, "norm", _spectral_norm(self.matrix))
        if self.ratio is not None:
            rebuilt = _similitude_matrix(self.ratio, self.angle or 0.0)
            err = max(abs(x - y) for rx, ry in zip(rebuilt, self.matrix)
                      for x, y in zip(rx, ry))
            if err > 1e-12:
                raise ValueError("similitude parameters do not match matrix")

    @staticmethod
    def similitude(fixed: Point2, ratio: float, angle: float) -> "Contraction":
        if not (math.isfinite(ratio) and math.isfinite(angle)):
            raise ValueError("non-finite similitude parameters")
        return Contraction(fixed, _similitude_matrix(ratio, angle), ratio, angle)

    @staticmethod
    def from_matrix(fixed: Point2, matrix: Matrix) -> "Contraction":
        m = tuple(tuple(float(x) for x in row) for row in matrix)
        ratio, angle = _detect_similitude(m)
        return Contraction(fixed, m, ratio, angle)

    @property
    def is_similitude(self) -> bool:
        return self.ratio is not None

    @property
    def det(self) -> float:
        (a, b), (c, d) = self.matrix
        return a * d - b * c

    def affine(self) -> AffineMap:
        (a, b), (c, d) = self.matrix
        px, py = self.fixed.x, self.fixed.y
        return AffineMap(a, b, c, d,
                         px - (a * px + b * py),
                         py - (c * px + d * py))

    def apply(self, z: Point2) -> Point2:
        (a, b), (c, d) = self.matrix
        dx, dy = z.x - self.fixed.x, z.y - self.fixed.y
        return Point2(self.fixed.x + a * dx + b * dy,
                      self.fixed.y + c * dx + d * dy)


def _similitude_matrix(ratio: float, angle: float) -> Matrix:
    co, si = ratio * math.cos(angle), ratio * math.sin(angle)
    return ((co, -si), (si, co))


@dataclass(frozen=True)
class IFS:
    """A finite family of planar contractions with probability weights."""

    maps: tuple[Contraction, ...]
    weights: tuple[float, ...]
    name: str = ""

    def __post_init__(self):
        if len(self.maps) < 1:
            raise ValueError("an IFS needs at least one map")
        if len(self.weights) != len(self.maps):
            raise ValueError("one weight per map required")
        if not all(math.isfinite(w) for w in self.weights):
            raise ValueError("non-finite weight")

    @staticmethod
    def create(maps: Sequence[Contraction],
               weights: Optional[Sequence[float]] = None,
               name: str = "") -> "IFS":
        """Build an IFS; missing weights default to the natural weights
        ratio^dimension, which requires every map to be a similitude."""
        maps = tuple(maps)
        if weights is None:
            if not all(m.is_similitude for m in maps):
                raise ValueError("weights required for non-similitude maps")
            probe = IFS(maps, tuple(1.0 / len(maps) for _ in maps), name)
            _, weights = similarity_dimension(probe)
        return IFS(maps, tuple(float(w) for w in weights), name)

    @property
    def n(self) -> int:
        return len(self.maps)

    @property
    def fixed_points(self) -> tuple[Point2, ...]:
        return tuple(m.fixed for m in self.maps)

    @property
    def lambda_max(self) -> float:
        return max(m.norm for m in self.maps)

    @property
    def lambda_min(self) -> float:
        return min(m.norm for m in self.maps)

    @property
    def diam_fixed_points(self) -> float:
        pts = self.fixed_points
        return max((p.distance(q) for p in pts for q in pts), default=0.0)


@dataclass(frozen=True)
class ValidationReport:
    norms: tuple[float, ...]
    invertible: tuple[bool, ...]
    similitude: tuple[bool, ...]
    weight_residual: float
    errors: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.errors


def validate(ifs: IFS) -> ValidationReport:
    """Check contractivity, invertibility and weight normalization."""
    errors: list[str] = []
    norms, invertible, simil = [], [], []
    for k, m in enumerate(ifs.maps, start=1):
        norms.append(m.norm)
        inv = abs(m.det) > 1e-12
        invertible.append(inv)
        simil.append(m.is_similitude)
        if m.norm >= 1.0:
            errors.append(f"not contractive (map {k})")
        if not inv:
            errors.append(f"non-invertible factor (map {k})")
    residual = abs(math.fsum(ifs.weights) - 1.0)
    if residual > 1e-9 or any(w < 0 or w > 1 for w in ifs.weights):
        errors.append("weights not normalized")
    return ValidationReport(tuple(norms), tuple(invertible), tuple(simil),
                            residual, tuple(errors))


def require_valid(ifs: IFS) -> None:
    report = validate(ifs)
    if not report.ok:
        raise ValueError("invalid IFS: " + "; ".join(report.errors))


def _check_address(ifs: IFS, address: Address) -> None:
    for idx in address:
        if not 1 <= idx <= ifs.n:
            raise ValueError(f"address index {idx} out of range 1..{ifs.n}")


def apply_address(ifs: IFS, address: Address, z: Point2) -> Point2:
    """Apply the composed map of an address: the last index acts first."""
    _check_address(ifs, address)
    for idx in reversed(address):
        z = ifs.maps[idx - 1].apply(z)
    return z


def compose_address(ifs: IFS, address: Address) -> tuple[AffineMap, float]:
    """Affine form of the address map plus its composed contraction factor.

    The factor is the product of member spectral norms: exact for similitude
    members and an upper bound on the composed norm in general.
    """
    _check_address(ifs, address)
    amap = AffineMap.identity()
    factor = 1.0
    for idx in address:
        amap = amap.compose(ifs.maps[idx - 1].affine())
        factor *= ifs.maps[idx - 1].norm
    return amap, factor


def address_weight(ifs: IFS, address: Address) -> float:
    _check_address(ifs, address)
    w = 1.0
    for idx in address:
        w *= ifs.weights[idx - 1]
    return w


def _check_budget(ifs: IFS, level: int, budget: int, seeds: int = 1) -> int:
    if level < 0:
        raise ValueError("level must be >= 0")
    count = seeds * ifs.n ** level
    if count > budget:
        raise BudgetExceededError(
            f"level {level} enumerates {count} addresses; "
            f"budget is {budget} (required budget {count})",
            required=count, budget=budget)
    return count


def level_cloud(ifs: IFS, level: int, seed: Optional[Point2] = None,
                budget: int = DEFAULT_BUDGET) -> np.ndarray:
    """All points T_a(seed) for |a| = level, in lexicographic address order,
    as an (n^level, 2) array. Seed defaults to the first fixed point."""
    require_valid(ifs)
    _check_budget(ifs, level, budget)
    if seed is None:
        seed = ifs.maps[0].fixed
    pts = np.array([[seed.x, seed.y]])
    affines = [m.affine() for m in ifs.maps]
    for _ in range(level):
        pts = np.concatenate([am.apply_array(pts) for am in affines], axis=0)
    return pts


def weighted_cloud(ifs: IFS, level: int, seed: Optional[Point2] = None,
                   budget: int = DEFAULT_BUDGET) -> tuple[np.ndarray, np.ndarray]:
    """Level cloud together with the address weights, in the same order."""
    require_valid(ifs)
    _check_budget(ifs, level, budget)
    if seed is None:
        seed = ifs.maps[0].fixed
    pts = np.array([[seed.x, seed.y]])
    wts = np.array([1.0])
    affines = [m.affine() for m in ifs.maps]
    for _ in range(level):
        pts = np.concatenate([am.apply_array(pts) for am in affines], axis=0)
        wts = np.concatenate([w * wts for w in ifs.weights])
    return pts, wts


def points_at_level(ifs: IFS, level: int, seed: Optional[Point2] = None,
                    budget: int = DEFAULT_BUDGET) -> list[tuple[Address, Point2]]:
    """Each address of the given length with its image of the seed point."""
    pts = level_cloud(ifs, level, seed, budget)
    addresses = itertools.product(range(1, ifs.n + 1), repeat=level)
    return [(addr, Point2(float(x), float(y)))
            for addr, (x, y) in zip(addresses, pts)]


def similarity_dimension(ifs: IFS) -> tuple[float, tuple[float, ...]]:
    """Similarity dimension s solving sum(ratio_k^s) = 1, by bisection,
    plus the natural weights ratio_k^s."""
    if not all(m.is_similitude for m in ifs.maps):
        raise ValueError("similarity dimension requires similitudes")
    ratios = [m.ratio for m in ifs.maps]
    if any(not 0.0 < r < 1.0 for r in ratios):
        raise ValueError("similarity dimension requires ratios in (0, 1)")
    if len(ratios) == 1:
        return 0.0, (1.0,)

    def f(s: float) -> float:
        return math.fsum(r ** s for r in ratios) - 1.0

    lo, hi = 0.0, 1.0
    while f(hi) > 0.0:
        hi *= 2.0
        if hi > 1e6:
            raise ValueError("similarity dimension search diverged")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if f(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    s = 0.5 * (lo + hi)
    return s, tuple(r ** s for r in ratios)


def invariant_ball(ifs: IFS) -> Disk:
    """A disk B centered at the fixed-point centroid with H(B) inside B.

    radius = max_k |T_k(center) - center| / (1 - norm_k); the containment is
    spot-checked on 64 boundary samples per map.
    """
    require_valid(ifs)
    pts = ifs.fixed_points
    cx = math.fsum(p.x for p in pts) / len(pts)
    cy = math.fsum(p.y for p in pts) / len(pts)
    center = Point2(cx, cy)
    radius = 0.0
    for m in ifs.maps:
        drift = m.apply(center).distance(center)
        radius = max(radius, drift / (1.0 - m.norm))
    for m in ifs.maps:
        for j in range(64):
            phi = 2.0 * math.pi * j / 64
            z = Point2(cx + radius * math.cos(phi), cy + radius * math.sin(phi))
            if m.apply(z).distance(center) > radius + 1e-9:
                raise RuntimeError("invariant ball containment check failed")
    return Disk(center, radius)


def format_address(address: Address) -> str:
    """Dash-separated indices; the empty (identity) address prints as 0."""
    return "-".join(str(i) for i in address) if address else "0"


def parse_address(text: str) -> Address:
    text = text.strip()
    if text in ("", "0"):
        return ()
    try:
        return tuple(int(part) for part in text.split("-"))
    except ValueError:
        raise ValueError(f"malformed address {text!r}; expected e.g. 1-2-1")
