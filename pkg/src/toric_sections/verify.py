"""Verification suites: exact algebra, geometric residuals, tracer statistics
and homology transport.

Each check returns a :class:`Check` with the measured value it was judged
on. Exact checks report a residual of 0.0 when they pass, so an absurdly
small ``tol`` only breaks the numeric ones.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from itertools import product
from typing import Callable

from . import retmap, sections
from .billiard import b_curves, billiard3, h_curve
from .flowtrace import random_traces
from .hyperbolic import quad_group, triangle_group
from .retmap import (
    HYPERBOLIC,
    family_of,
    geometry_type,
    hyperbolic_signatures,
    realize,
    return_map,
    trace_witness,
)
from .sl2z import CYCLIC, GenWord, IsometryType, Mat2, NotFound, canonical_class, conjugate_test, \
    conjugator_solve, gen_power, min_rotation

SUITES = ("algebra", "geometry", "tracer", "homology")


@dataclass
class Check:
    name: str
    suite: str
    passed: bool
    measured: dict = field(default_factory=dict)
    tolerance: float | None = None
    detail: str = ""
    seconds: float = 0.0

    def to_json(self) -> dict:
        out = {"name": self.name, "suite": self.suite, "status": "pass" if self.passed else "fail",
               "measured": self.measured}
        if self.tolerance is not None:
            out["tolerance"] = self.tolerance
        if self.detail:
            out["detail"] = self.detail
        return out


def _timed(fn: Callable[..., Check], *args) -> Check:
    t0 = time.perf_counter()
    try:
        chk = fn(*args)
    except Exception as exc:  # a crash is a failed check, not a crashed suite
        chk = Check(fn.__name__.removeprefix("check_"), "", False,
                    detail=f"{type(exc).__name__}: {exc}")
    chk.seconds = time.perf_counter() - t0
    return chk


# ---------------------------------------------------------------------------
# algebra


def check_figure_eight(tol=None) -> Check:
    res = return_map((2, 3, 7))[0]
    target = Mat2(2, 1, 1, 1)
    ok = (res.word == GenWord.of(("X", 1), ("Y", 1)) and res.trace == 3
          and canonical_class(res.matrix) == canonical_class(target))
    g = conjugator_solve(res.matrix, target)
    ok = ok and g @ res.matrix == target @ g
    return Check("figure_eight_return_map", "algebra", ok,
                 {"word": res.word.serialize(), "trace": res.trace,
                  "matrix": res.matrix.to_json(), "conjugator": g.to_json()})


def _same_ordering(a, b) -> bool:
    a, b = tuple(a), tuple(b)
    return min_rotation(a) == min_rotation(b) or min_rotation(a[::-1]) == min_rotation(b)


def check_formula_sweep(max_entry: int = 12) -> Check:
    failures = []
    n = 0
    for sig in hyperbolic_signatures(max_entry):
        for res in return_map(sig):
            n += 1
            if res.trace <= 2:
                failures.append(f"{sig}/{res.ordering}: trace {res.trace}")
                continue
            # return_map already insists the two routes are conjugate; repeat it here
            word_cls = canonical_class(res.word)
            prod_cls = canonical_class(retmap.step_product(retmap.step_factors(sig, res.ordering)))
            if word_cls != prod_cls:
                failures.append(f"{sig}/{res.ordering}: word and step product differ")
                continue
            fam = family_of(sig)
            back = realize(res.word)
            if not any(r.signature == tuple(sorted(sig)) and
                       (fam == "2qr" or _same_ordering(r.ordering, res.ordering)) for r in back):
                failures.append(f"{sig}/{res.ordering}: realize does not round-trip")
            if any(geometry_type(r.signature) != HYPERBOLIC for r in back):
                failures.append(f"{sig}: realize emitted a non-hyperbolic signature")
    return Check("formula_sweep", "algebra", not failures,
                 {"results": n, "failures": len(failures)}, detail="; ".join(failures[:5]))


EUCLIDEAN_LIMITS = ((2, 3, 6), (2, 4, 4), (3, 3, 3), (2, 2, 2, 2))


def check_euclidean_limits() -> Check:
    rows = []
    ok = True
    for sig in EUCLIDEAN_LIMITS:
        for res in return_map(sig):
            cls = res.isometry_class
            good = abs(res.trace) == 2 and cls.tag is IsometryType.PARABOLIC and cls.conjugator is not None
            if good:
                target = gen_power("X", cls.power)
                if cls.sign < 0:
                    target = -target
                g = cls.conjugator
                # verify the witness by exact multiplication
                good = g @ res.matrix == target @ g and g.a * g.d - g.b * g.c == 1
            ok &= good
            rows.append({"signature": list(sig), "ordering": list(res.ordering), "trace": res.trace,
                         "power": cls.power, "sign": cls.sign, "ok": good})
    return Check("euclidean_limits", "algebra", ok, {"cases": rows})


def positive_words(max_syllables: int = 6, max_exp: int = 3):
    """Alternating positive words with 2..max_syllables blocks."""
    for k in range(2, max_syllables + 1):
        for first in "XY":
            other = "Y" if first == "X" else "X"
            letters = [first if i % 2 == 0 else other for i in range(k)]
            for exps in product(range(1, max_exp + 1), repeat=k):
                yield GenWord(tuple(zip(letters, exps)))


def check_conjugacy_oracle(max_syllables: int = 6, max_exp: int = 3) -> Check:
    by_trace: dict[int, list[GenWord]] = {}
    for w in positive_words(max_syllables, max_exp):
        by_trace.setdefault(w.matrix.trace, []).append(w)
    equiv = inequiv = 0
    bad = []
    for words in by_trace.values():
        mats = [w.matrix for w in words]
        for i in range(len(words)):
            for j in range(i + 1, len(words)):
                verdict = conjugate_test(words[i], words[j], CYCLIC, witness=False)
                try:
                    g = conjugator_solve(mats[i], mats[j])
                except NotFound:
                    g = None
                if verdict.equivalent:
                    equiv += 1
                    if g is None or g @ mats[i] != mats[j] @ g:
                        bad.append(f"{words[i]} ~ {words[j]} without witness")
                else:
                    inequiv += 1
                    if g is not None:
                        bad.append(f"{words[i]} !~ {words[j]} but witness found")
    return Check("conjugacy_oracle", "algebra", not bad,
                 {"equivalentPairs": equiv, "inequivalentPairs": inequiv, "disagreements": len(bad)},
                 detail="; ".join(bad[:5]))


def check_trace_family(lo: int = 3, hi: int = 50) -> Check:
    bad = []
    for t in range(lo, hi + 1):
        w, sig = trace_witness(t)
        if w.matrix.trace != t or geometry_type(sig) != HYPERBOLIC:
            bad.append(t)
    return Check("trace_family", "algebra", not bad, {"range": [lo, hi], "failures": bad})


# ---------------------------------------------------------------------------
# geometry


GEOMETRY_SIGNATURES = ((2, 3, 7), (2, 4, 5), (3, 4, 5), (4, 4, 4), (2, 2, 3, 3), (3, 3, 3, 3))


def check_group_residuals(tol_relation=1e-9, tol_angle=1e-10) -> Check:
    rows = []
    worst_rel = worst_ang = 0.0
    for sig in GEOMETRY_SIGNATURES:
        grp = triangle_group(*sig) if len(sig) == 3 else quad_group(*sig)
        poly = grp.triangle if len(sig) == 3 else grp.quad
        rel = grp.relation_residual()
        ang = max(poly.angle_error(), grp.domain.angle_error())
        worst_rel, worst_ang = max(worst_rel, rel), max(worst_ang, ang)
        rows.append({"signature": list(sig), "relation": rel, "angle": ang,
                     "pairing": grp.domain.pairing_error()})
    ok = worst_rel <= tol_relation and worst_ang <= tol_angle
    return Check("group_residuals", "geometry", ok,
                 {"maxRelation": worst_rel, "maxAngle": worst_ang, "cases": rows},
                 min(tol_relation, tol_angle))


BILLIARD_SIGNATURES = ((3, 4, 5), (3, 3, 4), (4, 4, 4), (5, 5, 5))
H_SIGNATURES = ((2, 3, 7), (2, 4, 5))
B_SIGNATURES = ((2, 2, 3, 3), (3, 3, 3, 3))


def check_curves(tol=1e-9) -> Check:
    worst = 0.0
    rows = []
    problems = []
    for sig in BILLIARD_SIGNATURES:
        b = billiard3(triangle_group(*sig))
        r = max(b.residuals["reflectionLaw"], b.closure_error)
        if sig == (4, 4, 4):
            mid = max(abs(t - L / 2) for t, L in zip(b.bounce_params, _edge_lengths(sig)))
            rows.append({"signature": list(sig), "midpointOffset": mid})
            r = max(r, mid)
        worst = max(worst, r)
        rows.append({"signature": list(sig), "billiard": r})
    for sig in H_SIGNATURES:
        h = h_curve(triangle_group(*sig))
        worst = max(worst, h.closure_error)
        rows.append({"signature": list(sig), "h": h.closure_error})
    for sig in B_SIGNATURES:
        fc = b_curves(quad_group(*sig))
        n_pts, census = len(fc.points), fc.regions.census
        closure = max(fc.b1.closure_error, fc.b2.closure_error)
        worst = max(worst, closure)
        if n_pts != 4 or census != 6:
            problems.append(f"{sig}: {n_pts} intersections, {census} regions")
        rows.append({"signature": list(sig), "intersections": n_pts, "regions": census,
                     "closure": closure, "representative": list(fc.group.signature)})
    ok = worst <= tol and not problems
    return Check("curves", "geometry", ok, {"maxResidual": worst, "cases": rows}, tol,
                 "; ".join(problems))


def _edge_lengths(sig):
    from .billiard import _Billiard

    return _Billiard(triangle_group(*sig).triangle).lengths


# ---------------------------------------------------------------------------
# tracer


TRACER_SIGNATURES = ((2, 3, 7), (2, 4, 5), (3, 4, 5), (2, 2, 3, 3))


def check_tracer(seed: int = 0, n: int = 100, tol=1e-9) -> Check:
    rows = []
    ok = True
    worst_deck = 0.0
    for sig in TRACER_SIGNATURES:
        rev = sig == (3, 4, 5)
        rep = random_traces(sig, n=n, seed=seed, min_crossings=50, reverse=rev)
        deck = max(t.deck_residual for t in rep.traces + rep.reversed_traces)
        worst_deck = max(worst_deck, deck)
        row = rep.to_json()
        row["maxDeckResidual"] = deck
        good = (len(rep.traces) == n and rep.pass_rate() == 1.0 and rep.counts_agree()
                and rep.min_crossings() >= 50)
        if rev:
            good = good and rep.reversed_pass_rate() == 1.0
        row["ok"] = good
        ok &= good
        rows.append(row)
    ok = ok and worst_deck <= tol
    return Check("tracer", "tracer", ok, {"maxDeckResidual": worst_deck, "cases": rows}, tol)


# ---------------------------------------------------------------------------
# homology


def check_transport_matrices() -> Check:
    rows = []
    ok = True
    for q, r in ((3, 7), (4, 5), (5, 9)):
        m = sections.transport_matrix(sections.rules_2qr(q, r)[0])
        good = m == Mat2(0, -1, 1, q - 2)
        ok &= good
        rows.append({"family": "2qr", "q": q, "matrix": m.to_json(), "ok": good})
    for p, q, r in ((3, 4, 5), (4, 4, 4), (3, 7, 11)):
        m = sections.transport_matrix(sections.rules_pqr(p, q, r)[0])
        good = m == Mat2(0, -1, 1, q - 1)
        ok &= good
        rows.append({"family": "pqr", "q": q, "matrix": m.to_json(), "ok": good})
    for sig in ((2, 2, 3, 3), (3, 3, 3, 3), (2, 3, 4, 5)):
        m = sections.transport_matrix(sections.rules_pqrs(*sig)[0])
        good = m == Mat2(0, -1, 1, sig[0])
        ok &= good
        rows.append({"family": "pqrs", "p": sig[0], "matrix": m.to_json(), "ok": good})
    bad = []
    n = 0
    for sig in hyperbolic_signatures(12):
        for o in retmap.section_orderings(sig):
            n += 1
            if not sections.route_matches_step_factors(sig, o):
                bad.append(f"{sig}/{o}")
    ok = ok and not bad
    return Check("transport_matrices", "homology", ok,
                 {"cases": rows, "routesCompared": n, "routeMismatches": len(bad)},
                 detail="; ".join(bad[:5]))


def check_cw_models() -> Check:
    want = {"2qr": (1, -1), "pqr": (1, -1), "pqrs": (2, -2)}
    rows = []
    ok = True
    for fam, (bdry, chi) in want.items():
        cw = sections.cw_model(fam)
        good = cw.genus == 1 and cw.boundary_components == bdry and cw.euler_characteristic == chi
        ok &= good
        rows.append(cw.to_json())
    return Check("cw_models", "homology", ok, {"models": rows})


# ---------------------------------------------------------------------------


def run_suite(suite: str, seed: int = 0, tol: float | None = None) -> list[Check]:
    if suite == "all":
        return [c for s in SUITES for c in run_suite(s, seed, tol)]
    if suite == "algebra":
        checks = [_timed(check_figure_eight), _timed(check_formula_sweep),
                  _timed(check_euclidean_limits), _timed(check_conjugacy_oracle),
                  _timed(check_trace_family)]
    elif suite == "geometry":
        if tol is None:
            checks = [_timed(check_group_residuals), _timed(check_curves)]
        else:
            checks = [_timed(check_group_residuals, tol, tol), _timed(check_curves, tol)]
    elif suite == "tracer":
        checks = [_timed(check_tracer, seed, 100, 1e-9 if tol is None else tol)]
    elif suite == "homology":
        checks = [_timed(check_transport_matrices), _timed(check_cw_models)]
    else:
        raise ValueError(f"unknown suite {suite!r}")
    for c in checks:
        c.suite = suite
    return checks
