"""Command-line interface: IFS definition files in, verdicts, covers,
masses and shadow profiles out as text, CSV and SVG.

Exit codes: 0 success, 1 certified-empty intersection (or indeterminate
classification), 2 validation failure, 3 parse error, 4 rational-rotation
failure, 5 budget exceeded. All output is UTF-8 with LF line endings and
contains nothing nondeterministic.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from .geom2d import Line, Point2, convex_hull
from .hulls import hull_pair
from .ifs import (BudgetExceededError, Contraction, DEFAULT_BUDGET, IFS,
                  format_address, parse_address, similarity_dimension, validate)
from .intersect import (CHAIN, INDETERMINATE, NOT_HYPERDENSE,
                        RationalRotationError, angular_hits, chain_certify,
                        hyperdense_directional_test, line_intersect)
from .measure import (AngularSector, ConvexRegion, HalfPlane, Region, Slab,
                      nu_level, shadow_profile)

EXIT_OK = 0
EXIT_EMPTY = 1
EXIT_INVALID = 2
EXIT_PARSE = 3
EXIT_RATIONAL = 4
EXIT_BUDGET = 5


class DocumentError(Exception):
    """Malformed IFS document (exit code 3)."""


def load_document(path: str) -> IFS:
    """Parse an IFS definition file (JSON).

    Schema: {"name": str?, "maps": [{"fixed": [x, y], "lambda": l,
    "theta": t} | {"fixed": [x, y], "matrix": [[a, b], [c, d]]}],
    "weights": [w1, ...]?}. Missing weights derive the natural weights,
    which requires all maps to be similitudes.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise DocumentError(f"cannot read {path}: {exc}")
    except json.JSONDecodeError as exc:
        raise DocumentError(
            f"parse error: line {exc.lineno} column {exc.colno}: {exc.msg}")
    return document_to_ifs(doc)


def document_to_ifs(doc: object) -> IFS:
    if not isinstance(doc, dict) or "maps" not in doc:
        raise DocumentError("document must be an object with a 'maps' list")
    raw_maps = doc["maps"]
    if not isinstance(raw_maps, list) or not raw_maps:
        raise DocumentError("'maps' must be a non-empty list")
    maps: list[Contraction] = []
    for i, rec in enumerate(raw_maps, start=1):
        if not isinstance(rec, dict) or "fixed" not in rec:
            raise DocumentError(f"map {i}: record must have a 'fixed' point")
        fixed = rec["fixed"]
        if (not isinstance(fixed, list) or len(fixed) != 2
                or not all(isinstance(v, (int, float)) for v in fixed)):
            raise DocumentError(f"map {i}: 'fixed' must be [x, y]")
        p = Point2(float(fixed[0]), float(fixed[1]))
        try:
            if "matrix" in rec:
                maps.append(Contraction.from_matrix(p, rec["matrix"]))
            elif "lambda" in rec:
                maps.append(Contraction.similitude(
                    p, float(rec["lambda"]), float(rec.get("theta", 0.0))))
            else:
                raise DocumentError(
                    f"map {i}: need either 'lambda'/'theta' or 'matrix'")
        except (TypeError, ValueError) as exc:
            raise DocumentError(f"map {i}: {exc}")
    weights = doc.get("weights")
    if weights is not None:
        if (not isinstance(weights, list) or len(weights) != len(maps)
                or not all(isinstance(w, (int, float)) for w in weights)):
            raise DocumentError("'weights' must list one number per map")
        weights = [float(w) for w in weights]
    name = doc.get("name", "")
    if not isinstance(name, str):
        raise DocumentError("'name' must be a string")
    try:
        return IFS.create(maps, weights, name=name)
    except ValueError as exc:
        raise DocumentError(str(exc))


def ifs_to_document(ifs: IFS) -> dict:
    maps = []
    for m in ifs.maps:
        rec: dict = {"fixed": [m.fixed.x, m.fixed.y]}
        if m.is_similitude:
            rec["lambda"] = m.ratio
            rec["theta"] = m.angle
        else:
            rec["matrix"] = [list(row) for row in m.matrix]
        maps.append(rec)
    return {"name": ifs.name, "maps": maps, "weights": list(ifs.weights)}


def _require_valid(ifs: IFS) -> Optional[int]:
    report = validate(ifs)
    if not report.ok:
        for err in report.errors:
            print(f"ERROR: {err}")
        return EXIT_INVALID
    return None


def _parse_line(coeffs: Sequence[float]) -> Line:
    return Line(coeffs[0], coeffs[1], coeffs[2])


def _seed_point(ifs: IFS, seed: Optional[int]) -> Optional[Point2]:
    if seed is None:
        return None
    if not 1 <= seed <= ifs.n:
        raise ValueError(f"seed map index {seed} out of range 1..{ifs.n}")
    return ifs.maps[seed - 1].fixed


def parse_region(spec: str) -> Region:
    """Region grammar: 'halfplane a b c' | 'slab a b c eps' |
    'poly x1 y1 x2 y2 ...' | 'sector qx qy a b c eps'."""
    tokens = spec.split()
    if not tokens:
        raise ValueError("empty region spec")
    kind, args = tokens[0], tokens[1:]
    try:
        vals = [float(t) for t in args]
    except ValueError:
        raise ValueError(f"malformed number in region spec {spec!r}")
    if kind == "halfplane":
        if len(vals) != 3:
            raise ValueError("halfplane needs: a b c")
        return HalfPlane(vals[0], vals[1], vals[2])
    if kind == "slab":
        if len(vals) != 4:
            raise ValueError("slab needs: a b c eps")
        return Slab(Line(vals[0], vals[1], vals[2]), vals[3])
    if kind == "poly":
        if len(vals) < 2 or len(vals) % 2 != 0:
            raise ValueError("poly needs: x1 y1 x2 y2 ...")
        pts = [Point2(vals[i], vals[i + 1]) for i in range(0, len(vals), 2)]
        return ConvexRegion(convex_hull(pts))
    if kind == "sector":
        if len(vals) != 6:
            raise ValueError("sector needs: qx qy a b c eps")
        return AngularSector(Point2(vals[0], vals[1]),
                             Line(vals[2], vals[3], vals[4]), vals[5])
    raise ValueError(f"unknown region kind {kind!r}")


def _svg_bar_chart(offsets, masses, title: str) -> str:
    """Minimal deterministic SVG bar chart (no timestamps, no randomness)."""
    width, height = 800.0, 420.0
    ml, mr, mt, mb = 60.0, 20.0, 30.0, 50.0
    pw, ph = width - ml - mr, height - mt - mb
    n = len(offsets)
    peak = max(float(m) for m in masses) if n else 0.0
    scale = ph / peak if peak > 0 else 0.0
    bar_w = pw / n if n else pw
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:g}" '
        f'height="{height:g}" viewBox="0 0 {width:g} {height:g}">',
        f'<rect x="0" y="0" width="{width:g}" height="{height:g}" fill="white"/>',
        f'<text x="{width / 2:g}" y="20" text-anchor="middle" '
        f'font-family="monospace" font-size="14">{title}</text>',
    ]
    for i, m in enumerate(masses):
        h = float(m) * scale
        x = ml + i * bar_w
        y = mt + ph - h
        parts.append(f'<rect x="{x:.3f}" y="{y:.3f}" width="{bar_w:.3f}" '
                     f'height="{h:.3f}" fill="#336699"/>')
    ax_y = mt + ph
    parts.append(f'<line x1="{ml:g}" y1="{ax_y:g}" x2="{ml + pw:g}" '
                 f'y2="{ax_y:g}" stroke="black"/>')
    parts.append(f'<line x1="{ml:g}" y1="{mt:g}" x2="{ml:g}" y2="{ax_y:g}" '
                 'stroke="black"/>')
    if n:
        lo, hi = float(offsets[0]), float(offsets[-1])
        parts.append(f'<text x="{ml:g}" y="{ax_y + 18:g}" text-anchor="middle" '
                     f'font-family="monospace" font-size="11">{lo:.6g}</text>')
        parts.append(f'<text x="{ml + pw:g}" y="{ax_y + 18:g}" '
                     'text-anchor="middle" font-family="monospace" '
                     f'font-size="11">{hi:.6g}</text>')
        parts.append(f'<text x="{ml - 6:g}" y="{mt + 6:g}" text-anchor="end" '
                     f'font-family="monospace" font-size="11">{peak:.6g}</text>')
        parts.append(f'<text x="{ml - 6:g}" y="{ax_y:g}" text-anchor="end" '
                     'font-family="monospace" font-size="11">0</text>')
    parts.append(f'<text x="{width / 2:g}" y="{height - 12:g}" '
                 'text-anchor="middle" font-family="monospace" '
                 'font-size="12">ray offset</text>')
    parts.append('</svg>')
    return "\n".join(parts) + "\n"


def cmd_validate(args) -> int:
    ifs = load_document(args.file)
    report = validate(ifs)
    if args.dump_normalized:
        print(json.dumps(ifs_to_document(ifs), indent=2))
        return EXIT_OK if report.ok else EXIT_INVALID
    for k, (norm, inv, sim) in enumerate(
            zip(report.norms, report.invertible, report.similitude), start=1):
        m = ifs.maps[k - 1]
        extra = (f" similitude lambda={m.ratio!r} theta={m.angle!r}"
                 if sim else " general-affine")
        print(f"map {k}: norm {norm!r} invertible={inv}{extra}")
    print(f"weight sum residual: {report.weight_residual!r}")
    if report.ok and all(report.similitude):
        s, _ = similarity_dimension(ifs)
        print(f"similarity dimension: {s!r}")
    if report.ok:
        print("OK")
        return EXIT_OK
    for err in report.errors:
        print(f"ERROR: {err}")
    return EXIT_INVALID


def cmd_classify(args) -> int:
    ifs = load_document(args.file)
    code = _require_valid(ifs)
    if code is not None:
        return code
    verdict = chain_certify(ifs, args.level)
    if verdict.kind == INDETERMINATE:
        swept = hyperdense_directional_test(ifs, args.level, args.directions)
        if swept.kind == NOT_HYPERDENSE:
            verdict = swept
        else:
            print("VERDICT: indeterminate")
            print(f"REASON: {verdict.reason}")
            print(f"REASON: {swept.reason}")
            return EXIT_EMPTY
    if verdict.kind == CHAIN:
        print("VERDICT: chain")
    else:
        w = verdict.witness
        print(f"VERDICT: not-hyperdense WITNESS: {w.a!r} {w.b!r} {w.c!r}")
    return EXIT_OK


def cmd_intersect(args) -> int:
    ifs = load_document(args.file)
    code = _require_valid(ifs)
    if code is not None:
        return code
    line = _parse_line(args.line)
    hulls = hull_pair(ifs, args.level)
    cover = line_intersect(ifs, hulls, line, args.eps, budget=args.budget)
    if cover.is_empty:
        print("EMPTY")
        print(f"NODES_EXPANDED: {cover.nodes_expanded}")
        return EXIT_EMPTY
    print("t_lo,t_hi,address")
    for interval, address in cover.pieces:
        print(f"{interval.lo!r},{interval.hi!r},{format_address(address)}")
    print(f"TOTAL_LENGTH: {cover.total_length!r}")
    print(f"PIECES: {len(cover.pieces)}")
    print(f"NODES_EXPANDED: {cover.nodes_expanded}")
    return EXIT_OK


def cmd_shadow(args) -> int:
    ifs = load_document(args.file)
    code = _require_valid(ifs)
    if code is not None:
        return code
    seed = _seed_point(ifs, args.seed)
    profile = shadow_profile(ifs, args.theta, args.level, seed=seed,
                             hull_level=args.hull_level)
    if args.csv:
        rows = ["offset,mass"]
        rows += [f"{o!r},{m!r}" for o, m in profile.rows()]
        with open(args.csv, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(rows) + "\n")
    if args.svg:
        title = (f"shadow profile theta={args.theta:g} level={args.level} "
                 f"spacing={profile.spacing:.6g}")
        with open(args.svg, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(_svg_bar_chart(profile.offsets, profile.masses, title))
    print(f"RAYS: {len(profile.offsets)}")
    print(f"SPACING: {profile.spacing!r}")
    print(f"MASS_TOTAL: {float(profile.masses.sum())!r}")
    return EXIT_OK


def cmd_measure(args) -> int:
    ifs = load_document(args.file)
    code = _require_valid(ifs)
    if code is not None:
        return code
    region = parse_region(args.region)
    seed = _seed_point(ifs, args.seed)
    mass = nu_level(ifs, args.level, region, seed=seed)
    print(f"MASS: {mass!r}")
    return EXIT_OK


def cmd_angular(args) -> int:
    ifs = load_document(args.file)
    code = _require_valid(ifs)
    if code is not None:
        return code
    line = _parse_line(args.line)
    address = parse_address(args.address)
    hits = angular_hits(ifs, args.map, address, line, args.eps, args.count)
    print("k,x,y,angle")
    for k, p, ang in hits:
        print(f"{k},{p.x!r},{p.y!r},{ang!r}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fractalline",
        description="Decide and quantify intersections between planar IFS "
                    "fractal attractors and lines.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check an IFS definition file")
    p.add_argument("file")
    p.add_argument("--dump-normalized", action="store_true",
                   help="emit the normalized document as JSON")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("classify", help="chain / hyperdensity certification")
    p.add_argument("file")
    p.add_argument("--level", type=int, default=8)
    p.add_argument("--directions", type=int, default=64)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("intersect", help="epsilon-accurate line cover")
    p.add_argument("file")
    p.add_argument("--line", type=float, nargs=3, required=True,
                   metavar=("A", "B", "C"), help="line a*x + b*y = c")
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--level", type=int, default=8)
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.set_defaults(func=cmd_intersect)

    p = sub.add_parser("shadow", help="ray-absorption density profile")
    p.add_argument("file")
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--csv", help="write the profile as CSV")
    p.add_argument("--svg", help="write the profile as an SVG bar chart")
    p.add_argument("--seed", type=int,
                   help="1-based map index of the seed fixed point")
    p.add_argument("--hull-level", type=int, default=8)
    p.set_defaults(func=cmd_shadow)

    p = sub.add_parser("measure", help="invariant-measure mass of a region")
    p.add_argument("file")
    p.add_argument("--region", required=True,
                   help="'halfplane a b c' | 'slab a b c eps' | "
                        "'poly x1 y1 ...' | 'sector qx qy a b c eps'")
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--seed", type=int,
                   help="1-based map index of the seed fixed point")
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("angular", help="angular-neighborhood intersections")
    p.add_argument("file")
    p.add_argument("--map", type=int, required=True,
                   help="1-based index of the rotating similitude")
    p.add_argument("--address", default="0",
                   help="dash-separated address of the line point (0 = none)")
    p.add_argument("--line", type=float, nargs=3, required=True,
                   metavar=("A", "B", "C"))
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--count", type=int, required=True)
    p.set_defaults(func=cmd_angular)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DocumentError as exc:
        print(f"ERROR: {exc}")
        return EXIT_PARSE
    except RationalRotationError as exc:
        print(f"ERROR: {exc}")
        return EXIT_RATIONAL
    except BudgetExceededError as exc:
        print(f"ERROR: budget exceeded: {exc}")
        return EXIT_BUDGET
    except ValueError as exc:
        print(f"ERROR: {exc}")
        return EXIT_INVALID


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
