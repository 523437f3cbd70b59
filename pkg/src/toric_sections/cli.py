"""Command-line front end.

Every command prints one JSON document on stdout. Exit codes: 0 success,
1 bad input, 2 numeric or verification failure. Diagnostics and timings
go to stderr only, so stdout is byte-identical across identical runs.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from . import sections
from .billiard import (
    CandidateWordFailed,
    DecompositionMismatch,
    NotAcute,
    OptimizerFailed,
    WalkDegenerate,
    b_curves,
    billiard3,
    h_curve,
)
from .flowtrace import Degenerate, StepLimit, UnitTangent, trace_ray, trace_setup
from .hyperbolic import HPoint, RootFindFailed, quad_group, triangle_group, uhp_from_klein
from .retmap import (
    BadSignature,
    NoBothLetters,
    brunella_genus,
    family_of,
    format_signature,
    geometry_type,
    orbifold_chi,
    parse_signature,
    realize,
    return_map,
)
from .sl2z import NotHyperbolic, WordSyntaxError, parse_word
from .svg import Drawing, render_curves, render_domain, render_path, render_points
from .verify import SUITES, run_suite

SCHEMA_VERSION = 1

NUMERIC_ERRORS = (OptimizerFailed, CandidateWordFailed, DecompositionMismatch, WalkDegenerate,
                  RootFindFailed, Degenerate, StepLimit)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(1)


def _emit(payload: dict) -> None:
    doc = {"schemaVersion": SCHEMA_VERSION}
    doc.update(payload)
    print(json.dumps(doc, indent=2))


def _signature(text: str) -> tuple[int, ...]:
    try:
        return parse_signature(text)
    except BadSignature as exc:
        raise UsageError(str(exc)) from exc


# ---------------------------------------------------------------------------
# commands


def cmd_return_map(args) -> int:
    sig = _signature(args.signature)
    ordering = _signature(args.ordering) if args.ordering else None
    try:
        results = return_map(sig, ordering)
    except BadSignature as exc:
        raise UsageError(str(exc)) from exc
    if not args.all_classes:
        results = results[:1]
    out = []
    for res in results:
        d = res.to_json()
        # the word's own matrix; "matrix" is the step product, which is only conjugate to it
        d["wordMatrix"] = res.word.matrix.to_json()
        out.append(d)
    _emit({"command": "return-map", "signature": format_signature(sig), "results": out})
    return 0


def cmd_realize(args) -> int:
    try:
        word = parse_word(args.word)
        found = realize(word)
    except WordSyntaxError as exc:
        raise UsageError(f"cannot parse word: {exc}") from exc
    except (NotHyperbolic, NoBothLetters) as exc:
        raise UsageError(str(exc)) from exc
    notes = []
    g = brunella_genus(word)
    if g is not None:
        if g in (2, 3):
            notes.append(f"in the class X^2(X^2Y^{g - 1})^2 with g={g}: has at most four Y, "
                         "so it is realized despite the six X")
        else:
            notes.append(f"in the class X^2(X^2Y^{g - 1})^2 with g={g}: six X and more than four Y")
    if not found:
        notes.append("no sphere with 3 or 4 cone points realizes this class through these "
                     "sections; other orbifolds are not excluded")
    _emit({"command": "realize", "word": word.serialize(),
           "realizations": [r.to_json() for r in found], "notes": notes})
    return 0


def cmd_verify(args) -> int:
    suite = args.suite
    checks = run_suite(suite, seed=args.seed, tol=args.tol)
    for c in checks:
        print(f"{c.suite}/{c.name}: {'pass' if c.passed else 'FAIL'} ({c.seconds:.2f} s)",
              file=sys.stderr)
    passed = all(c.passed for c in checks)
    _emit({"command": "verify", "suite": suite, "seed": args.seed, "tol": args.tol,
           "passed": passed, "checks": [c.to_json() for c in checks]})
    return 0 if passed else 2


def _parse_start(text: str) -> UnitTangent:
    try:
        x, y, theta = (float(v) for v in text.split(","))
    except ValueError as exc:
        raise UsageError(f"--trace-start wants x,y,theta, got {text!r}") from exc
    if not y > 0 or not all(math.isfinite(v) for v in (x, y, theta)):
        raise UsageError("--trace-start needs finite values and y > 0")
    return UnitTangent(HPoint(x, y), theta)


def _group(sig):
    try:
        return triangle_group(*sig) if len(sig) == 3 else quad_group(*sig)
    except BadSignature as exc:
        raise UsageError(str(exc)) from exc


def cmd_render(args) -> int:
    sig = _signature(args.signature)
    what = args.what
    group = _group(sig)
    title = f"{what} for {format_signature(sig)}"
    drawing = Drawing(title)
    summary: dict = {}
    if what == "domain":
        render_domain(group.domain, drawing)
    elif what == "billiard":
        if len(sig) != 3 or sig[0] == 2:
            raise UsageError("billiard needs three cone points of order at least 3")
        try:
            b = billiard3(group)
        except NotAcute as exc:
            raise UsageError(str(exc)) from exc
        render_domain(group.domain, drawing)
        render_curves([b], drawing)
        render_points({k: v.klein() for k, v in b.bounce_points.items()}, drawing)
        summary["perimeter"] = b.perimeter
    elif what == "h":
        if len(sig) != 3 or sig[0] != 2:
            raise UsageError("h needs a signature 2,q,r")
        h = h_curve(group)
        render_domain(group.domain, drawing)
        render_curves([h], drawing)
        render_points({k: v[0] for k, v in h.marked_points.items()}, drawing)
        summary["length"] = h.length
    elif what == "bcurves":
        if len(sig) != 4:
            raise UsageError("bcurves needs four cone points")
        fc = b_curves(group)
        render_domain(fc.group.domain, drawing)
        render_curves([fc.b1, fc.b2], drawing)
        render_points(fc.points, drawing)
        summary["representative"] = format_signature(fc.group.signature)
    else:
        start = _parse_start(args.trace_start) if args.trace_start else None
        setup = trace_setup(sig)
        if start is None:
            start = UnitTangent(uhp_from_klein(setup.domain.centroid()), 0.3)
        tr = trace_ray(start, args.length, sig, keep_path=True)
        render_domain(setup.domain, drawing)
        render_curves(setup.curves, drawing)
        render_path(tr.path, drawing)
        summary["code"] = str(tr.code)
        summary["crossings"] = tr.labels
        summary["pathChords"] = len(tr.path)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(drawing.to_string())
    _emit({"command": "render", "signature": format_signature(sig), "what": what, "out": args.out,
           "polygons": drawing.counts["polygons"], "curveChords": drawing.counts["curves"],
           "markedPoints": drawing.counts["points"], **summary})
    return 0


def cmd_explain(args) -> int:
    sig = _signature(args.signature)
    kind = geometry_type(sig)
    out = {"command": "explain", "signature": format_signature(sig), "geometry": kind,
           "orbifoldChi": str(orbifold_chi(sig))}
    if kind != "spherical_or_bad":
        fam = family_of(sig)
        out["family"] = fam
        out["cwModel"] = sections.cw_model(fam).to_json()
        out["transport"] = [dict(r.to_json(), matrix=sections.transport_matrix(r).to_json())
                            for r in sections.route_rules(sig)]
        out["routeProduct"] = sections.compose_route(sig).to_json()
    _emit(out)
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="toric-sections",
                description="Genus-one sections of geodesic flows on 2-orbifolds.")
    sub = p.add_subparsers(dest="command", required=True)

    rm = sub.add_parser("return-map", help="first-return map of the sections")
    rm.add_argument("--signature", required=True, help="cone orders, e.g. 2,3,7")
    rm.add_argument("--ordering", help="cyclic order of the cone points")
    rm.add_argument("--all-classes", action="store_true",
                    help="every section (both orientations, every necklace class)")
    rm.set_defaults(func=cmd_return_map)

    rz = sub.add_parser("realize", help="orbifolds whose return map has the class of a word")
    rz.add_argument("--word", required=True, help="word in X, Y, e.g. X^2Y")
    rz.set_defaults(func=cmd_realize)

    vf = sub.add_parser("verify", help="run verification suites")
    vf.add_argument("--suite", choices=SUITES + ("all",), default="all")
    vf.add_argument("--seed", type=int, default=0)
    vf.add_argument("--tol", type=float, default=None,
                    help="override every numeric tolerance")
    vf.set_defaults(func=cmd_verify)

    rd = sub.add_parser("render", help="write an SVG in the Poincare disk")
    rd.add_argument("--signature", required=True)
    rd.add_argument("--what", required=True, choices=("domain", "billiard", "h", "bcurves", "trace"))
    rd.add_argument("--out", required=True, help="SVG file to write")
    rd.add_argument("--trace-start", help="x,y,theta: upper half-plane point and direction")
    rd.add_argument("--length", type=float, default=20.0)
    rd.set_defaults(func=cmd_render)

    ex = sub.add_parser("explain", help="family, cell model and transport rules of a signature")
    ex.add_argument("--signature", required=True)
    ex.set_defaults(func=cmd_explain)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NUMERIC_ERRORS as exc:
        print(f"numeric failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
