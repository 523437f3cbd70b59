"""Geodesic tracing through the fundamental domain, codes and section crossings.

A geodesic is followed chord by chord in the Klein model: each chord runs
from the entry point to the first side it meets, and the walk continues
from the paired side. Crossings of the boundary-curve chords switch the
current region; the code records the cone-point parts that are entered.

Section crossings for the order-2 family are read off geometrically (each
crossing of h is a section crossing). For three and four cone points each
passage from one part to the next sweeps through a fixed run of sections
(``pass_sections``); ``code_crossings`` counts the same crossings from the
code with the non-increasing-factor rule, and the two must agree.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .billiard import cross_side, curves_for, exit_side
from .hyperbolic import (
    Domain,
    HPoint,
    Isometry,
    apply_klein,
    axis_of,
    group_for,
    klein_distance,
    klein_from_boundary,
    minkowski,
    uhp_from_klein,
)
from .retmap import family_of

DEGENERATE_RADIUS = 1e-8


class Degenerate(RuntimeError):
    pass


class BoundaryOrbit(Degenerate):
    pass


class StepLimit(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# section models

SECTIONS = {"2qr": ("Q", "R"), "pqr": ("A", "C", "B"), "pqrs": ("A", "D", "C", "B")}

# successor of each part letter around the section cycle, and the section
# met first when leaving that part
_SUCC = {
    "2qr": {"R": "Q", "Q": "R"},
    "pqr": {"R": "P", "P": "Q", "Q": "R"},
    "pqrs": {"Q": "R", "R": "S", "S": "P", "P": "Q"},
}
_FIRST = {
    "2qr": {"R": "Q", "Q": "R"},
    "pqr": {"R": "A", "Q": "C", "P": "B"},
    "pqrs": {"Q": "A", "P": "D", "S": "C", "R": "B"},
}

# total orders for the non-increasing factor rule, largest first
SECTION_ORDERS = {
    "pqr": {"A": "RPQ", "C": "QRP", "B": "PQR"},
    "pqrs": {"A": "QRSP", "D": "PQRS", "C": "SPQR", "B": "RSPQ"},
}


def _pred(family: str, x: str) -> str:
    for k, v in _SUCC[family].items():
        if v == x:
            return k
    raise KeyError(x)


def pass_sections(family: str, x: str, y: str) -> list[str]:
    """Sections crossed while passing from part ``x`` to part ``y``."""
    if family == "2qr":
        return [y] if x != y else []
    out = []
    z = x
    while True:
        out.append(_FIRST[family][z])
        z = _pred(family, z)
        if z == y:
            break
    return out


@dataclass(frozen=True)
class CodeWord:
    symbols: tuple[str, ...]
    cyclic: bool = False

    def factors(self) -> list[tuple[str, str]]:
        s = self.symbols
        pairs = list(zip(s, s[1:]))
        if self.cyclic and s:
            pairs.append((s[-1], s[0]))
        return pairs

    def __str__(self):
        return "".join(self.symbols) + ("(cyclic)" if self.cyclic else "")

    def __len__(self):
        return len(self.symbols)


def code_crossings(code: CodeWord, family: str, section: str, rotated: bool = False) -> int:
    """Crossings of ``section`` predicted by the factors of ``code``.

    Three and four cone points: a factor ``xy`` counts when ``x >= y`` in
    the section's order. ``rotated`` counts for the sections obtained by
    turning every tangent vector by pi, met by the reversed geodesic.
    """
    count = 0
    for x, y in code.factors():
        if rotated:
            x, y = y, x
        if family == "2qr":
            count += int(x != y and y == section)
        else:
            order = SECTION_ORDERS[family][section]
            count += int(order.index(x) <= order.index(y))
    return count


# ---------------------------------------------------------------------------
# tracing setup


@dataclass
class TraceSetup:
    signature: tuple[int, ...]
    family: str
    group: object
    domain: Domain
    curves: list
    regions: object
    arcs: list[tuple[np.ndarray, np.ndarray, str]]
    _pieces: list[tuple[np.ndarray, np.ndarray, str]] = field(default_factory=list)

    def locate(self, x, tol: float = 1e-13) -> str:
        for a, e, label in self._pieces:
            if np.all(e[:, 0] * (x[1] - a[:, 1]) - e[:, 1] * (x[0] - a[:, 0]) >= -tol):
                return label
        raise Degenerate(f"point {x} not in any region")

    def is_part(self, label: str) -> bool:
        return len(label) == 1


@lru_cache(maxsize=None)
def trace_setup(signature: tuple[int, ...]) -> TraceSetup:
    """Group, curves and regions for tracing; cached per signature."""
    sig = tuple(signature)
    group, curves, regions = curves_for(group_for(sig))
    arcs = [(c.start, c.end, c.curve) for curve in curves for c in curve.chords]
    setup = TraceSetup(sig, family_of(sig), group, group.domain, curves, regions, arcs)
    for i, poly in enumerate(regions.pieces):
        a = np.asarray(poly, float)
        e = np.roll(a, -1, axis=0) - a
        setup._pieces.append((a, e, regions.region_of_piece(i)))
    return setup


# ---------------------------------------------------------------------------
# tracing


@dataclass(frozen=True)
class UnitTangent:
    basepoint: HPoint
    direction: float

    def forward_ideal(self) -> np.ndarray:
        """Klein coordinates of the forward endpoint of the geodesic."""
        u = self.basepoint
        w = cmath.exp(1j * (self.direction - math.pi / 2))
        if abs(1 - w) < 1e-15:
            return klein_from_boundary(math.inf)
        z = 1j * (1 + w) / (1 - w)
        return klein_from_boundary(u.y * z.real + u.x)

    def reversed(self) -> "UnitTangent":
        return UnitTangent(self.basepoint, self.direction + math.pi)


@dataclass(frozen=True)
class Crossing:
    section: str
    time: float
    cell: str

    def to_json(self) -> dict:
        return {"section": self.section, "time": self.time, "cell": self.cell}


@dataclass
class TraceResult:
    family: str
    code: CodeWord
    crossings: list[Crossing]
    deck: np.ndarray
    length: float
    degenerate: bool = False
    rotated: bool = False
    deck_residual: float = float("nan")
    path: list[tuple[np.ndarray, np.ndarray]] = field(default_factory=list)

    @property
    def labels(self) -> list[str]:
        return [c.section for c in self.crossings]

    def section_counts(self) -> dict[str, int]:
        counts = {s: 0 for s in SECTIONS[self.family]}
        for c in self.crossings:
            counts[c.section] += 1
        return counts

    def factor_counts(self) -> dict[str, int]:
        return {s: code_crossings(self.code, self.family, s, self.rotated)
                for s in SECTIONS[self.family]}

    def counts_agree(self) -> bool:
        return self.section_counts() == self.factor_counts()

    def max_gaps(self) -> dict[str, float]:
        out = {}
        for s in SECTIONS[self.family]:
            times = [c.time for c in self.crossings if c.section == s]
            gaps = np.diff(times) if len(times) > 1 else []
            out[s] = float(np.max(gaps)) if len(gaps) else math.inf
        return out

    def to_json(self) -> dict:
        return {
            "code": "".join(self.code.symbols),
            "cyclic": self.code.cyclic,
            "crossings": [c.to_json() for c in self.crossings],
            "deck": self.deck.tolist(),
            "length": self.length,
            "degenerate": self.degenerate,
        }


def _hyperboloid(k) -> np.ndarray:
    k = np.asarray(k, float)
    return np.array([k[0], k[1], 1.0]) / math.sqrt(1 - float(k @ k))


def _arc_hits(setup: TraceSetup, x, y):
    """Crossings of the chord ``x -> y`` with curve arcs: ``(s, curve)``."""
    d = y - x
    dl = math.hypot(*d)
    hits = []
    if dl == 0.0:  # walk started on a side
        return hits
    for a, b, name in setup.arcs:
        e = b - a
        el = math.hypot(*e)
        den = d[0] * e[1] - d[1] * e[0]
        w = a - x
        if abs(den) < 1e-12 * dl * el:
            # parallel: running along the arc is a boundary orbit
            off = abs(e[0] * w[1] - e[1] * w[0]) / el
            if off < DEGENERATE_RADIUS:
                raise BoundaryOrbit(f"geodesic runs along {name}")
            continue
        s = (w[0] * e[1] - w[1] * e[0]) / den
        u = (w[0] * d[1] - w[1] * d[0]) / den
        if 1e-12 < s <= 1.0 and -1e-12 <= u <= 1 + 1e-12:
            hits.append((s, name))
    hits.sort()
    for (s1, _), (s2, _) in zip(hits, hits[1:]):
        if (s2 - s1) * dl < DEGENERATE_RADIUS:
            raise Degenerate("geodesic passes through a curve intersection point")
    return hits


def _walk(setup: TraceSetup, k, xi, deck, length: float, min_crossings: int | None,
          keep_path: bool, max_chords: int):
    """Walk the geodesic; returns region entries, arc crossing times and state."""
    dom = setup.domain
    x, skip = np.asarray(k, float), None
    t = 0.0
    entries = [(0.0, setup.locate(x))]
    arc_times: list[tuple[float, str]] = []
    path = []
    chords = 0
    part_entries = int(setup.is_part(entries[0][1]))
    while True:
        chords += 1
        if chords > max_chords:
            raise StepLimit(f"more than {max_chords} chords")
        i, y, gap = exit_side(dom, x, xi, skip)
        if gap < DEGENERATE_RADIUS:
            raise Degenerate("geodesic passes through a vertex of the domain")
        hits = _arc_hits(setup, x, y)
        dt = klein_distance(x, y)
        stop = None
        if length is not None and t + dt >= length:
            stop = length
        for j, (s, name) in enumerate(hits):
            p = x + s * (y - x)
            th = t + klein_distance(x, p)
            if stop is not None and th > stop:
                break
            s_next = hits[j + 1][0] if j + 1 < len(hits) else 1.0
            label = setup.locate(x + 0.5 * (s + s_next) * (y - x))
            arc_times.append((th, name))
            entries.append((th, label))
            part_entries += int(setup.is_part(label))
        if stop is not None:
            end = _point_at(x, y, stop - t)
            if keep_path:
                path.append((x.copy(), end))
            return entries, arc_times, end, deck, stop, path
        if keep_path:
            path.append((x.copy(), y.copy()))
        t += dt
        if min_crossings is not None and part_entries > min_crossings + 1:
            return entries, arc_times, y, deck, t, path
        x, xi = cross_side(dom, i, y, xi)
        deck = deck @ dom.lorentz[i]
        skip = dom.partner[i]


def _visits(setup: TraceSetup, entries, cyclic: bool, period: float | None):
    """Part visits ``(label, enter, leave, next_cell)`` from region entries."""
    if cyclic:
        entries = [e for e in entries if e[0] > 0]
    visits = []
    for j, (t, label) in enumerate(entries):
        if not setup.is_part(label):
            continue
        if j + 1 < len(entries):
            leave, nxt = entries[j + 1]
        elif cyclic:
            leave, nxt = entries[0][0] + period, entries[0][1]
        else:
            leave, nxt = math.inf, ""
        visits.append((label, t, leave, nxt))
    return visits


def _section_crossings(setup: TraceSetup, entries, arc_times, cyclic, period, rotated):
    fam = setup.family
    if fam == "2qr":
        out = []
        for (t, label), _ in zip(entries[1:], arc_times):
            out.append(Crossing(label, t, label))
        return out
    visits = _visits(setup, entries, cyclic, period)
    pairs = list(zip(visits, visits[1:]))
    if cyclic and visits:
        last, first = visits[-1], visits[0]
        pairs.append((last, (first[0], first[1] + period, first[2] + period, first[3])))
    out = []
    for (x, _, leave, cell), (y, enter, _, _) in pairs:
        secs = pass_sections(fam, y, x)[::-1] if rotated else pass_sections(fam, x, y)
        n = len(secs)
        for j, sec in enumerate(secs):
            out.append(Crossing(sec, leave + (j + 1) * (enter - leave) / (n + 1), cell))
    return out


def _code(setup: TraceSetup, entries, cyclic: bool) -> CodeWord:
    if cyclic:
        entries = [e for e in entries if e[0] > 0]
    return CodeWord(tuple(l for _, l in entries if setup.is_part(l)), cyclic)


def trace_ray(start: UnitTangent, max_length: float | None, signature: Sequence[int],
              min_crossings: int | None = None, rotated: bool = False,
              keep_path: bool = False, max_chords: int = 200_000) -> TraceResult:
    """Follow the geodesic of ``start`` for ``max_length``.

    With ``min_crossings`` the trace stops once that many part entries are
    past (whichever limit comes first). ``rotated`` labels crossings by the
    pi-rotated sections, for a reversed start.
    """
    setup = trace_setup(tuple(signature))
    dom = setup.domain
    k0 = start.basepoint.klein()
    xi0 = start.forward_ideal()
    k, L = dom.reduce_point(k0)
    xi = apply_klein(L, xi0)
    xi = xi / math.hypot(*xi)
    deck0 = np.linalg.inv(L)
    entries, arc_times, end, deck, t_end, path = _walk(
        setup, k, xi, deck0, max_length, min_crossings, keep_path, max_chords)
    crossings = _section_crossings(setup, entries, arc_times, False, None, rotated)
    code = _code(setup, entries, False)
    res = TraceResult(setup.family, code, crossings, deck, t_end, rotated=rotated, path=path)
    res.deck_residual = deck_residual(k0, xi0, deck, end, t_end)
    return res


def _point_at(x, y, dist: float) -> np.ndarray:
    """Point of the chord ``x -> y`` at hyperbolic distance ``dist`` from ``x``."""
    lo, hi = 0.0, 1.0
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if klein_distance(x, x + mid * (y - x)) < dist:
            lo = mid
        else:
            hi = mid
    return x + lo * (y - x)


def deck_residual(k0, xi0, deck, end, t_end: float) -> float:
    """Relative hyperboloid mismatch between the walked and the exact endpoint."""
    u0 = _hyperboloid(k0)
    n = np.array([xi0[0], xi0[1], 1.0])
    v0 = n / (-minkowski(n, u0)) - u0
    exact = math.cosh(t_end) * u0 + math.sinh(t_end) * v0
    walked = deck @ _hyperboloid(end)
    return float(np.max(np.abs(walked - exact)) / math.cosh(t_end))


def trace_axis(g: Isometry, signature: Sequence[int], keep_path: bool = False) -> TraceResult:
    """One period of the closed geodesic with axis of ``g``; cyclic code.

    ``g`` must belong to ``trace_setup(signature).group``, which for four
    cone points may be a relabeled or twisted copy of ``quad_group``.
    """
    setup = trace_setup(tuple(signature))
    dom = setup.domain
    axis, ell = axis_of(g)
    e1, e2 = axis.klein_endpoints()
    span = e2 - e1
    c = dom.centroid()
    lam = float((c - e1) @ span) / float(span @ span)
    foot = e1 + min(max(lam, 0.05), 0.95) * span
    k, L = dom.reduce_point(foot)
    xi = apply_klein(L, e2)
    xi = xi / math.hypot(*xi)
    _check_not_curve(setup, k, xi)
    entries, arc_times, _, deck, _, path = _walk(
        setup, k, xi, np.linalg.inv(L), ell, None, keep_path, 200_000)
    crossings = _section_crossings(setup, entries, arc_times, True, ell, False)
    if setup.family == "2qr":
        crossings = [c for c in crossings if c.time > 0]
    code = _code(setup, entries, True)
    return TraceResult(setup.family, code, crossings, deck, ell, path=path)


def _check_not_curve(setup: TraceSetup, k, xi) -> None:
    back_dir = k - xi
    for a, b, name in setup.arcs:
        e = b - a
        el = math.hypot(*e)
        if abs(e[0] * (k[1] - a[1]) - e[1] * (k[0] - a[0])) / el < DEGENERATE_RADIUS and \
                abs(e[0] * back_dir[1] - e[1] * back_dir[0]) < 1e-10 * el * math.hypot(*back_dir):
            raise BoundaryOrbit(f"axis is a lift of {name}")


# ---------------------------------------------------------------------------
# verdicts and batches


HIT_PATTERNS = {"2qr": ("Q", "R"), "pqr": ("A", "C", "B"), "pqrs": ("A", "D", "C", "B")}


@dataclass(frozen=True)
class HitCycleVerdict:
    passed: bool
    pattern: tuple[str, ...]
    phase: int | None
    first_failure: int | None

    def to_json(self) -> dict:
        return {"passed": self.passed, "pattern": list(self.pattern), "phase": self.phase,
                "firstFailure": self.first_failure}


def verify_hit_cycle(labels, family: str, reverse: bool = False) -> HitCycleVerdict:
    """Crossing labels follow the family's cyclic pattern from some phase."""
    if isinstance(labels, TraceResult):
        reverse = reverse or labels.rotated
        labels = labels.labels
    pattern = HIT_PATTERNS[family]
    if reverse:
        pattern = (pattern[0],) + tuple(reversed(pattern[1:]))
    labels = list(labels)
    if len(labels) < 2:
        return HitCycleVerdict(False, pattern, None, 0)
    if labels[0] not in pattern:
        return HitCycleVerdict(False, pattern, None, 0)
    phase = pattern.index(labels[0])
    n = len(pattern)
    for j, lab in enumerate(labels):
        if lab != pattern[(phase + j) % n]:
            return HitCycleVerdict(False, pattern, phase, j)
    return HitCycleVerdict(True, pattern, phase, None)


def random_start(domain: Domain, rng: np.random.Generator) -> UnitTangent:
    lo, hi = domain.klein.min(axis=0), domain.klein.max(axis=0)
    while True:
        k = rng.uniform(lo, hi)
        if domain.contains(k, -1e-9):
            break
    return UnitTangent(uhp_from_klein(k), float(rng.uniform(0, 2 * math.pi)))


@dataclass
class BatchReport:
    signature: tuple[int, ...]
    traces: list[TraceResult]
    degenerate: int
    reversed_traces: list[TraceResult] = field(default_factory=list)

    @property
    def family(self) -> str:
        return family_of(self.signature)

    def pass_rate(self) -> float:
        ok = sum(verify_hit_cycle(t, self.family).passed for t in self.traces)
        return ok / len(self.traces) if self.traces else 0.0

    def reversed_pass_rate(self) -> float:
        ok = sum(verify_hit_cycle(t, self.family).passed for t in self.reversed_traces)
        return ok / len(self.reversed_traces) if self.reversed_traces else 0.0

    def counts_agree(self) -> bool:
        return all(t.counts_agree() for t in self.traces + self.reversed_traces)

    def max_gap(self) -> dict[str, float]:
        out: dict[str, float] = {}
        for t in self.traces:
            for s, g in t.max_gaps().items():
                out[s] = max(out.get(s, 0.0), g)
        return out

    def min_crossings(self) -> int:
        return min((len(t.crossings) for t in self.traces), default=0)

    def to_json(self) -> dict:
        return {
            "signature": list(self.signature),
            "traces": len(self.traces),
            "degenerate": self.degenerate,
            "hitCyclePassRate": self.pass_rate(),
            "reversedPassRate": self.reversed_pass_rate() if self.reversed_traces else None,
            "countsAgree": self.counts_agree(),
            "minCrossings": self.min_crossings(),
            "maxGap": self.max_gap(),
        }


def random_traces(signature: Sequence[int], n: int = 100, seed: int = 0,
                  min_crossings: int = 50, reverse: bool = False,
                  max_attempts: int | None = None) -> BatchReport:
    """``n`` non-degenerate random traces; each has its own spawned RNG."""
    sig = tuple(signature)
    setup = trace_setup(sig)
    seeds = np.random.SeedSequence(seed).spawn(max_attempts or 4 * n)
    traces, rev, degenerate = [], [], 0
    for ss in seeds:
        if len(traces) >= n:
            break
        rng = np.random.default_rng(ss)
        start = random_start(setup.domain, rng)
        try:
            tr = trace_ray(start, None, sig, min_crossings=min_crossings)
            rt = trace_ray(start.reversed(), None, sig, min_crossings=min_crossings,
                           rotated=True) if reverse else None
        except Degenerate:
            degenerate += 1
            continue
        traces.append(tr)
        if rt is not None:
            rev.append(rt)
    return BatchReport(sig, traces, degenerate, rev)
