"""Boundary curves of the sections and the regions they cut out.

* ``h_curve``: the geodesic through P and its mirror image (order-2 case);
* ``billiard3``: the period-3 billiard orbit of an acute triangle;
* ``b_curves``: the two geodesics of the four-cone-point case.

Each curve is unfolded through the fundamental domain into Klein chords;
``region_map`` splits the domain along those chords and glues the pieces
across side pairings.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from .hyperbolic import (
    Domain,
    GeodesicLine,
    HPoint,
    Isometry,
    PolygonPatch,
    TriangleGroup,
    TwistedQuadGroup,
    apply_klein,
    axis_of,
    direction_between,
    distance,
    exp_map,
    klein_distance,
    reflection_through,
    RootFindFailed,
    quad_group,
    rotation_about,
    twisted_quad_group,
    wrap_angle,
)


class NotAcute(ValueError):
    pass


class OptimizerFailed(RuntimeError):
    pass


class CandidateWordFailed(RuntimeError):
    pass


class DecompositionMismatch(RuntimeError):
    pass


class WalkDegenerate(RuntimeError):
    pass


EPS_KLEIN = 1e-11
TOL_INTERSECT = 1e-8


# ---------------------------------------------------------------------------
# walking a geodesic through the domain


def _unit(v):
    return v / math.hypot(v[0], v[1])


def exit_side(domain: Domain, k: np.ndarray, xi: np.ndarray, skip: int | None = None):
    """First side hit by the chord from ``k`` towards ideal point ``xi``.

    Returns ``(side, exit_point, vertex_gap)`` where ``vertex_gap`` is the
    Klein distance from the exit point to the nearest vertex.
    """
    d = xi - k
    best = None
    for i in range(domain.n):
        if i == skip:
            continue
        a = domain.klein[i]
        b = domain.klein[(i + 1) % domain.n]
        e = b - a
        cr = e[0] * d[1] - e[1] * d[0]
        if cr >= -1e-300:
            continue
        f = e[0] * (k[1] - a[1]) - e[1] * (k[0] - a[0])
        s = -f / cr
        if s < -1e-12:
            continue
        if best is None or s < best[0]:
            best = (s, i)
    if best is None:
        raise WalkDegenerate("no exit side found")
    s, i = best
    x = k + s * d
    gap = float(np.min(np.hypot(*(domain.klein - x).T)))
    return i, x, gap


def cross_side(domain: Domain, i: int, x: np.ndarray, xi: np.ndarray):
    """Pull the exit point and the forward end back across side ``i``."""
    Linv = domain.lorentz_inv[i]
    x2 = apply_klein(Linv, x)
    xi2 = _unit(apply_klein(Linv, xi))
    return x2, xi2


def side_copies(domain: Domain, x, tol: float = 1e-10) -> list[np.ndarray]:
    """``x`` plus its images on partner sides when it lies on the boundary."""
    out = [np.asarray(x, float)]
    for i in range(domain.n):
        L = math.hypot(*(domain.klein[(i + 1) % domain.n] - domain.klein[i]))
        if abs(domain.side_value(i, x)) < tol * L:
            out.append(apply_klein(domain.lorentz_inv[i], x))
    return out


@dataclass
class Chord:
    curve: str
    start: np.ndarray
    end: np.ndarray
    entry_side: int
    exit_side: int
    t0: float
    t1: float

    def point_at(self, t: float) -> np.ndarray:
        # Klein chords are straight, but not arc-length parametrized
        lo, hi = 0.0, 1.0
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            if self.t0 + klein_distance(self.start, self.start + mid * (self.end - self.start)) < t:
                lo = mid
            else:
                hi = mid
        return self.start + 0.5 * (lo + hi) * (self.end - self.start)

    def to_json(self) -> dict:
        return {"curve": self.curve, "start": self.start.tolist(), "end": self.end.tolist(),
                "entrySide": self.entry_side, "exitSide": self.exit_side,
                "t0": self.t0, "t1": self.t1}


def _entry_point(domain: Domain, k, back):
    i, x, _ = exit_side(domain, k, back)
    return i, x


def unfold_axis(domain: Domain, line: GeodesicLine, length: float, name: str = "curve",
                max_chords: int = 10_000) -> tuple[list[Chord], float]:
    """Chords of the closed geodesic covered by ``line`` inside ``domain``.

    Walks one period starting from the entry point of the chord that holds
    the reduced foot point. Returns the chords and the closure residual
    (distance between the starting point and the point reached after one
    period, plus the length defect).
    """
    e1, e2 = line.klein_endpoints()
    c = domain.centroid()
    span = e2 - e1
    lam = float((c - e1) @ span) / float(span @ span)
    foot = e1 + min(max(lam, 0.05), 0.95) * span
    k, L = domain.reduce_point(foot)
    fwd = _unit(apply_klein(L, e2))
    back = _unit(apply_klein(L, e1))
    entry, x0 = _entry_point(domain, k, back)
    chords: list[Chord] = []
    t = 0.0
    x, xi, side_in = x0, fwd, entry
    while t < length - 1e-7:
        if len(chords) >= max_chords:
            raise WalkDegenerate("too many chords while unfolding")
        i, y, gap = exit_side(domain, x, xi, skip=side_in)
        if gap < 1e-9:
            raise WalkDegenerate(f"{name} passes through a vertex")
        dt = klein_distance(x, y)
        chords.append(Chord(name, x.copy(), y.copy(), side_in, i, t, t + dt))
        t += dt
        x, xi = cross_side(domain, i, y, xi)
        side_in = domain.partner[i]
    closure = klein_distance(x, x0) + abs(t - length)
    return chords, closure


# ---------------------------------------------------------------------------
# curve data


@dataclass
class ClosedCurveData:
    name: str
    element: Isometry
    axis: GeodesicLine
    length: float
    chords: list[Chord]
    marked_points: dict[str, list[np.ndarray]] = field(default_factory=dict)
    closure_error: float = 0.0
    residuals: dict[str, float] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "element": self.element.to_json(),
            "axis": [self.axis.start, self.axis.end],
            "length": self.length,
            "closureError": self.closure_error,
            "residuals": self.residuals,
            "chords": [c.to_json() for c in self.chords],
            "markedPoints": {k: [p.tolist() for p in v] for k, v in self.marked_points.items()},
        }


def h_curve(group: TriangleGroup) -> ClosedCurveData:
    """Closed geodesic through P and its mirror image P' (order-2 P)."""
    if group.signature[0] != 2:
        raise ValueError("h_curve needs the order-2 cone point first")
    P = group.vertex("P")
    Pb = group.p_bar
    g = rotation_about(Pb, math.pi) @ rotation_about(P, math.pi)
    axis, ell = axis_of(g)
    d = distance(P, Pb)
    residuals = {
        "lengthDefect": abs(ell - 2 * d),
        "distP": axis.distance_to(P),
        "distPbar": axis.distance_to(Pb),
    }
    # the lift through D is the diagonal P -> P'
    dom = group.domain
    kP, kPb = P.klein(), Pb.klein()
    ip = dom.labels.index("P")
    ipb = dom.labels.index("P'")
    chord = Chord("h", kP, kPb, ip, ipb, 0.0, d)
    return ClosedCurveData("h", g, axis, ell, [chord], {"P": [kP], "P'": [kPb]},
                           max(residuals.values()), residuals)


def _edge_point(a: HPoint, b: HPoint, t: float) -> tuple[HPoint, float]:
    ang = direction_between(a, b)
    return exp_map(a, ang, t), ang


class _Billiard:
    """Perimeter of inscribed triangles with one vertex per side."""

    def __init__(self, tri: PolygonPatch):
        self.P, self.Q, self.R = tri.vertices
        self.edges = [(self.Q, self.R), (self.R, self.P), (self.P, self.Q)]  # A, B, C
        self.lengths = [distance(a, b) for a, b in self.edges]

    def points(self, ts):
        return [_edge_point(a, b, t) for (a, b), t in zip(self.edges, ts)]

    def perimeter(self, ts) -> float:
        (A, _), (B, _), (C, _) = self.points(ts)
        return distance(A, B) + distance(B, C) + distance(C, A)

    def angles(self, ts):
        """Angles at each bounce between the edge direction and the two chords."""
        pts = self.points(ts)
        out = []
        for i, (X, _) in enumerate(pts):
            a, b = self.edges[i]
            edge_dir = direction_between(X, b) if distance(X, b) > 1e-12 else \
                direction_between(a, X)
            Y = pts[(i + 1) % 3][0]
            Z = pts[(i + 2) % 3][0]
            t1 = abs(wrap_angle(direction_between(X, Y) - edge_dir))
            t2 = abs(wrap_angle(direction_between(X, Z) - edge_dir))
            out.append((t1, t2))
        return out

    def gradient(self, ts) -> np.ndarray:
        return np.array([-math.cos(t1) - math.cos(t2) for t1, t2 in self.angles(ts)])


def _newton_polish(bil: _Billiard, ts: np.ndarray, steps: int = 30) -> np.ndarray:
    """Drive the analytic gradient of the perimeter to zero."""
    h = 1e-6
    for _ in range(steps):
        g = bil.gradient(ts)
        if np.max(np.abs(g)) < 1e-14:
            break
        H = np.empty((3, 3))
        for j in range(3):
            e = np.zeros(3)
            e[j] = h
            H[:, j] = (bil.gradient(ts + e) - bil.gradient(ts - e)) / (2 * h)
        step = np.linalg.solve(H, g)
        ts = ts - step
    return ts


def billiard3(group_or_triangle, domain: Domain | None = None) -> ClosedCurveData:
    """Period-3 billiard orbit: bounce A on QR, B on RP, C on PQ."""
    if isinstance(group_or_triangle, TriangleGroup):
        tri = group_or_triangle.triangle
        domain = domain or group_or_triangle.domain
    else:
        tri = group_or_triangle
    if max(tri.angles) >= math.pi / 2 - 1e-15:
        raise NotAcute(f"triangle with angles {tri.angles} is not acute")
    bil = _Billiard(tri)
    ts = np.array([L / 2 for L in bil.lengths])
    prev = math.inf
    for _ in range(200):
        for j in range(3):
            def f(t, j=j):
                v = ts.copy()
                v[j] = t
                return bil.perimeter(v)
            res = minimize_scalar(f, bounds=(0.0, bil.lengths[j]), method="bounded",
                                  options={"xatol": 1e-12})
            ts[j] = res.x
        cur = bil.perimeter(ts)
        if prev - cur < 1e-14:
            break
        prev = cur
    if np.max(np.abs(bil.gradient(ts))) > 1e-4:
        res = minimize(bil.perimeter, ts, method="Nelder-Mead",
                       options={"xatol": 1e-12, "fatol": 1e-15, "maxiter": 20_000})
        ts = res.x
    ts = _newton_polish(bil, ts)
    if not all(0 < t < L for t, L in zip(ts, bil.lengths)):
        raise OptimizerFailed("bounce point left its edge")
    (A, _), (B, _), (C, _) = bil.points(ts)
    perimeter = bil.perimeter(ts)
    P, Q, R = tri.vertices
    s_qr, s_rp, s_pq = (reflection_through(Q, R), reflection_through(R, P),
                        reflection_through(P, Q))
    k = s_rp @ s_pq @ s_qr
    g = k @ k
    axis, ell = axis_of(g)
    reflection = [abs(t1 + t2 - math.pi) for t1, t2 in bil.angles(ts)]
    residuals = {
        "reflectionLaw": max(reflection),
        "gradient": float(np.max(np.abs(bil.gradient(ts)))),
        "lengthDefect": abs(ell - 2 * perimeter),
        "distA": axis.distance_to(A),
        "distB": axis.distance_to(B),
    }
    closure = max(residuals["lengthDefect"], residuals["distA"], residuals["distB"])
    marked = {"A": [A.klein()], "B": [B.klein()], "C": [C.klein()]}
    chords: list[Chord] = []
    if domain is not None:
        chords, unfold_closure = unfold_axis(domain, axis, ell, "b")
        closure = max(closure, unfold_closure)
    data = ClosedCurveData("b", g, axis, ell, chords, marked, closure, residuals)
    data.bounce_params = ts  # type: ignore[attr-defined]
    data.perimeter = perimeter  # type: ignore[attr-defined]
    data.bounce_points = {"A": A, "B": B, "C": C}  # type: ignore[attr-defined]
    return data


# ---------------------------------------------------------------------------
# four cone points


def _side_key(domain: Domain, i: int) -> frozenset:
    return frozenset((domain.labels[i], domain.labels[(i + 1) % domain.n]))


def _key(*labels) -> frozenset:
    return frozenset(labels)


# chord pattern of b2 as (entry side, exit side); P1=P, P2=P', S1=S, S2=S'
B2_PATTERN = [
    (_key("P'", "S'"), _key("Q", "P'")),
    (_key("P", "Q"), _key("R", "S")),
    (_key("S'", "R"), _key("P", "Q")),
    (_key("Q", "P'"), _key("S'", "R")),
    (_key("R", "S"), _key("S", "P")),
]
B1_PATTERN = [(_key("S", "P"), _key("P'", "S'"))]

# sides crossed on the way out of the hexagon, in order
B1_EXITS = (("P'", "S'"),)
B2_EXITS = (("Q", "P'"), ("R", "S"), ("P", "Q"), ("S'", "R"), ("S", "P"))


def pairing_word(domain: Domain, exits) -> Isometry:
    """Deck element reached after leaving through ``exits`` in turn."""
    g = Isometry.identity()
    for a, b in exits:
        g = g @ domain.pairing[domain.side_index(a, b)]
    return g


def _chord_pattern(domain: Domain, chords: Sequence[Chord]):
    return [(_side_key(domain, c.entry_side), _side_key(domain, c.exit_side)) for c in chords]


def _cyclic_match(seq, pattern) -> int | None:
    n = len(pattern)
    if len(seq) != n:
        return None
    for r in range(n):
        if all(seq[(r + i) % n] == pattern[i] for i in range(n)):
            return r
    return None


def _rotate_chords(chords: list[Chord], r: int, length: float) -> list[Chord]:
    out = chords[r:] + chords[:r]
    t = 0.0
    res = []
    for c in out:
        dt = c.t1 - c.t0
        res.append(Chord(c.curve, c.start, c.end, c.entry_side, c.exit_side, t, t + dt))
        t += dt
    return res


def _curve_from_element(domain: Domain, g: Isometry, name: str, pattern):
    """Unfold ``g``'s axis and orient it to match ``pattern``."""
    axis, ell = axis_of(g)
    for line, elem in ((axis, g), (axis.reversed(), g.inverse())):
        chords, closure = unfold_axis(domain, line, ell, name)
        r = _cyclic_match(_chord_pattern(domain, chords), pattern)
        if r is not None:
            return ClosedCurveData(name, elem, line, ell, _rotate_chords(chords, r, ell),
                                   {}, closure)
    return None


def _pairing_words(domain: Domain, max_len: int):
    gens = [(f"g{i}", domain.pairing[i]) for i in range(domain.n)]
    frontier = [("", Isometry.identity(), None)]
    for _ in range(max_len):
        nxt = []
        for word, g, last in frontier:
            for i, (name, h) in enumerate(gens):
                if last is not None and domain.partner[i] == last:
                    continue  # immediate cancellation
                w = g @ h
                yield f"{word}{name}", w
                nxt.append((f"{word}{name}", w, i))
        frontier = nxt


def search_curve(domain: Domain, pattern, name: str, max_len: int = 8):
    """Bounded search over pairing words for an axis with the chord pattern."""
    for word, g in _pairing_words(domain, max_len):
        if abs(g.trace) <= 2 + 1e-9:
            continue
        try:
            data = _curve_from_element(domain, g, name, pattern)
        except WalkDegenerate:
            continue
        if data is not None:
            data.residuals["searchWord"] = len(word)  # type: ignore[assignment]
            return data
    raise CandidateWordFailed(f"no pairing word of length <= {max_len} realizes {name}")


def _segment_intersection(a0, a1, b0, b1):
    da, db = a1 - a0, b1 - b0
    den = da[0] * db[1] - da[1] * db[0]
    if abs(den) < 1e-300:
        return None
    w = b0 - a0
    s = (w[0] * db[1] - w[1] * db[0]) / den
    u = (w[0] * da[1] - w[1] * da[0]) / den
    if -1e-12 <= s <= 1 + 1e-12 and -1e-12 <= u <= 1 + 1e-12:
        return s, u, a0 + s * da
    return None


def curve_intersections(c1: ClosedCurveData, c2: ClosedCurveData, domain: Domain):
    """Transverse intersection points in the quotient, with times on each curve."""
    pts = []
    for ch1 in c1.chords:
        for ch2 in c2.chords:
            hit = _segment_intersection(ch1.start, ch1.end, ch2.start, ch2.end)
            if hit is None:
                continue
            s, u, x = hit
            t1 = ch1.t0 + klein_distance(ch1.start, x)
            t2 = ch2.t0 + klein_distance(ch2.start, x)
            copies = side_copies(domain, x)
            if any(min(klein_distance(y, q) for y in copies) < TOL_INTERSECT for q, *_ in pts):
                continue
            pts.append((x, t1, t2))
    return pts


@dataclass
class FourPointCurves:
    group: object
    b1: ClosedCurveData
    b2: ClosedCurveData
    points: dict[str, np.ndarray]
    times_b1: dict[str, float]
    times_b2: dict[str, float]
    regions: "RegionDecomposition"
    same_cyclic_order: bool
    incidence_ok: bool

    def to_json(self) -> dict:
        return {
            "b1": self.b1.to_json(), "b2": self.b2.to_json(),
            "points": {k: v.tolist() for k, v in self.points.items()},
            "intersections": len(self.points),
            "sameCyclicOrder": self.same_cyclic_order,
            "twisted": isinstance(self.group, TwistedQuadGroup),
            "incidenceOk": self.incidence_ok,
            "regions": self.regions.to_json(),
        }


EXPECTED_PART_VERTICES = {"P": {"A", "B"}, "Q": {"C", "D"}, "R": {"B", "C"}, "S": {"D", "A"}}


def _b_curves_on(group, search_len: int) -> FourPointCurves:
    dom = group.domain
    b1 = _curve_from_element(dom, pairing_word(dom, B1_EXITS), "b1", B1_PATTERN)
    if b1 is None:
        b1 = search_curve(dom, B1_PATTERN, "b1", search_len)
    b2 = _curve_from_element(dom, pairing_word(dom, B2_EXITS), "b2", B2_PATTERN)
    if b2 is None:
        b2 = search_curve(dom, B2_PATTERN, "b2", search_len)

    hits = curve_intersections(b1, b2, dom)
    if len(hits) != 4:
        raise DecompositionMismatch(f"b1 and b2 meet in {len(hits)} points, expected 4")
    raw = {f"X{i}": x for i, (x, _, _) in enumerate(hits)}
    regions = region_map(dom, b1.chords + b2.chords,
                         {k: [v] for k, v in raw.items()}, cell_prefix="T")
    if regions.census != 6:
        raise DecompositionMismatch(f"{regions.census} regions, expected 6")
    p_pts = regions.part_vertices("P")
    order1 = [f"X{i}" for i in sorted(range(4), key=lambda i: hits[i][1])]
    order2 = [f"X{i}" for i in sorted(range(4), key=lambda i: hits[i][2])]
    start = 0
    for i, name in enumerate(order1):
        if name in p_pts and order1[(i + 1) % 4] in p_pts:
            start = i
    names = {order1[(start + j) % 4]: "ABCD"[j] for j in range(4)}
    same = _cyclic_match([names[x] for x in order2], list("ABCD")) is not None
    points = {names[k]: v for k, v in raw.items()}
    t1 = {names[f"X{i}"]: hits[i][1] for i in range(4)}
    t2 = {names[f"X{i}"]: hits[i][2] for i in range(4)}
    regions.rename_points(names)
    incidence_ok = all(regions.part_vertices(part) == want
                       for part, want in EXPECTED_PART_VERTICES.items())
    b1.marked_points = {k: [v] for k, v in points.items()}
    b2.marked_points = {k: [v] for k, v in points.items()}
    regions.orient_cells(b1)
    return FourPointCurves(group, b1, b2, points, t1, t2, regions, same, incidence_ok)


TWISTS = (0.15, -0.15, 0.05, -0.05)


def _representatives(group, twists):
    """The given group, twisted copies, then the other cyclic relabelings."""
    sig = tuple(group.signature)
    yield group
    for k in range(4):
        rot = sig[k:] + sig[:k]
        if k:
            yield quad_group(*rot)
        for tw in twists:
            try:
                yield twisted_quad_group(*rot, twist=tw)
            except RootFindFailed:
                continue


def b_curves(group, search_len: int = 8, twists=TWISTS) -> FourPointCurves:
    """Curves b1, b2 with their four intersection points A, B, C, D.

    b1 is conjugate to the product of the rotations at P and Q, so it runs
    through two cone points when p = q = 2 or r = s = 2, in every hyperbolic
    structure. Mirror-symmetric groups add further degenerate cases. The
    construction therefore retries on twisted groups and then on cyclic
    relabelings of the signature (which give the same return map class);
    ``FourPointCurves.group.signature`` records the one used. The bounded
    word search runs only after every candidate word has failed.
    """
    errors = []
    reps = list(_representatives(group, twists))
    for depth in (0, search_len):
        for rep in reps:
            try:
                return _b_curves_on(rep, depth)
            except (WalkDegenerate, CandidateWordFailed, DecompositionMismatch) as exc:
                errors.append(f"{type(rep).__name__}{tuple(rep.signature)}: {exc}")
        if not search_len:
            break
    raise DecompositionMismatch("no representative gives non-degenerate b1, b2; " + "; ".join(errors[:6]))


# ---------------------------------------------------------------------------
# regions


def _split(poly: np.ndarray, a: np.ndarray, b: np.ndarray):
    """Split a convex polygon by the line through ``a, b``."""
    d = b - a
    vals = d[0] * (poly[:, 1] - a[1]) - d[1] * (poly[:, 0] - a[0])
    scale = max(1.0, float(np.max(np.abs(poly))))
    vals = np.where(np.abs(vals) < EPS_KLEIN * scale, 0.0, vals)
    if np.all(vals >= 0) or np.all(vals <= 0):
        return [poly]
    left, right = [], []
    n = len(poly)
    for i in range(n):
        p, vp = poly[i], vals[i]
        q, vq = poly[(i + 1) % n], vals[(i + 1) % n]
        if vp >= 0:
            left.append(p)
        if vp <= 0:
            right.append(p)
        if vp * vq < 0:
            x = p + (q - p) * (vp / (vp - vq))
            left.append(x)
            right.append(x)
    return [np.array(left), np.array(right)]


def _on_segment(x, a, b, tol=1e-9) -> bool:
    d = b - a
    L = math.hypot(*d)
    if L == 0:
        return False
    cr = abs(d[0] * (x[1] - a[1]) - d[1] * (x[0] - a[0])) / L
    s = float((x - a) @ d) / (L * L)
    return cr < tol and -tol <= s <= 1 + tol


def _point_in_convex(poly: np.ndarray, x, tol=0.0) -> bool:
    n = len(poly)
    area = 0.5 * sum(poly[i - 1, 0] * poly[i, 1] - poly[i, 0] * poly[i - 1, 1] for i in range(n))
    sgn = 1 if area > 0 else -1
    for i in range(n):
        a, b = poly[i], poly[(i + 1) % n]
        if sgn * ((b[0] - a[0]) * (x[1] - a[1]) - (b[1] - a[1]) * (x[0] - a[0])) < -tol:
            return False
    return True


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, i):
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def union(self, i, j):
        self.parent[self.find(i)] = self.find(j)


@dataclass
class RegionDecomposition:
    pieces: list[np.ndarray]
    piece_region: list[int]
    labels: list[str]  # per region
    adjacency: set[tuple[str, str]]
    incidences: dict[str, set[str]]  # region label -> marked point names
    chord_lines: list[tuple[np.ndarray, np.ndarray, str]] = field(default_factory=list)

    @property
    def census(self) -> int:
        return len(self.labels)

    def region_of_piece(self, i: int) -> str:
        return self.labels[self.piece_region[i]]

    def locate(self, x, tol=1e-12) -> str | None:
        for i, poly in enumerate(self.pieces):
            if _point_in_convex(poly, x, tol):
                return self.region_of_piece(i)
        return None

    def part_vertices(self, part: str) -> set[str]:
        return set(self.incidences.get(part, set()))

    def rename_points(self, names: dict[str, str]) -> None:
        self.incidences = {r: {names.get(p, p) for p in pts} for r, pts in self.incidences.items()}

    def cells(self) -> list[str]:
        return [l for l in self.labels if len(l) > 1]

    def orient_cells(self, curve: ClosedCurveData) -> None:
        """Name cells so that ``curve`` runs clockwise around the first one."""
        cells = self.cells()
        if len(cells) != 2:
            return
        clockwise = {}
        for i, poly in enumerate(self.pieces):
            lab = self.region_of_piece(i)
            if lab not in cells or lab in clockwise:
                continue
            c = poly.mean(axis=0)
            for ch in curve.chords:
                n = len(poly)
                for j in range(n):
                    a, b = poly[j], poly[(j + 1) % n]
                    if _on_segment(a, ch.start, ch.end) and _on_segment(b, ch.start, ch.end) \
                            and np.hypot(*(b - a)) > 1e-9:
                        d = ch.end - ch.start
                        side = d[0] * (c[1] - ch.start[1]) - d[1] * (c[0] - ch.start[0])
                        clockwise[lab] = side < 0
                        break
                if lab in clockwise:
                    break
        if len(clockwise) == 2 and clockwise[cells[0]] is False and clockwise[cells[1]] is True:
            a, b = cells
            swap = {a: b, b: a}
            self.labels = [swap.get(l, l) for l in self.labels]
            self.adjacency = {tuple(sorted((swap.get(x, x), swap.get(y, y))))
                              for x, y in self.adjacency}
            self.incidences = {swap.get(k, k): v for k, v in self.incidences.items()}

    def to_json(self) -> dict:
        return {
            "census": self.census,
            "labels": sorted(self.labels),
            "adjacency": sorted([list(a) for a in self.adjacency]),
            "incidences": {k: sorted(v) for k, v in sorted(self.incidences.items())},
        }


def region_map(domain: Domain, chords: Sequence[Chord],
               marked: dict[str, list[np.ndarray]] | None = None,
               cell_prefix: str = "orthic") -> RegionDecomposition:
    """Split the domain along the curve chords and glue across pairings."""
    pieces = [domain.klein.copy()]
    for ch in chords:
        nxt = []
        for poly in pieces:
            nxt.extend(_split(poly, ch.start, ch.end))
        pieces = [p for p in nxt if len(p) >= 3]

    def on_chord(x):
        return any(_on_segment(x, ch.start, ch.end, 1e-9) for ch in chords)

    piece_cones = []
    for poly in pieces:
        cones = set()
        for vi, v in enumerate(domain.klein):
            if on_chord(v):
                continue
            if any(math.hypot(*(v - w)) < 1e-9 for w in poly):
                cones.add(domain.cones[vi])
        piece_cones.append(cones)

    uf = _UnionFind(len(pieces))
    for pi, poly in enumerate(pieces):
        n = len(poly)
        for j in range(n):
            a, b = poly[j], poly[(j + 1) % n]
            if math.hypot(*(b - a)) < 1e-12:
                continue
            mid = 0.5 * (a + b)
            for i in range(domain.n):
                va, vb = domain.klein[i], domain.klein[(i + 1) % domain.n]
                if _on_segment(a, va, vb) and _on_segment(b, va, vb):
                    img = apply_klein(domain.lorentz_inv[i], mid)
                    pj = domain.partner[i]
                    wa, wb = domain.klein[pj], domain.klein[(pj + 1) % domain.n]
                    for qi, other in enumerate(pieces):
                        m = len(other)
                        for k in range(m):
                            c, d = other[k], other[(k + 1) % m]
                            if _on_segment(c, wa, wb) and _on_segment(d, wa, wb) \
                                    and _on_segment(img, c, d):
                                uf.union(pi, qi)

    roots = sorted({uf.find(i) for i in range(len(pieces))})
    region_cones = {r: set() for r in roots}
    for i, cones in enumerate(piece_cones):
        region_cones[uf.find(i)] |= cones
    labels, index = [], {}
    n_cells = 0
    for r in roots:
        cones = region_cones[r]
        if len(cones) == 1:
            lab = next(iter(cones))
        elif not cones:
            n_cells += 1
            lab = f"{cell_prefix}{n_cells}"
        else:
            raise DecompositionMismatch(f"region holds several cone points {sorted(cones)}")
        index[r] = len(labels)
        labels.append(lab)
    if len(set(labels)) != len(labels):
        raise DecompositionMismatch(f"cone point split across regions: {labels}")
    piece_region = [index[uf.find(i)] for i in range(len(pieces))]

    adjacency = set()
    for pi, poly in enumerate(pieces):
        n = len(poly)
        for j in range(n):
            a, b = poly[j], poly[(j + 1) % n]
            if math.hypot(*(b - a)) < 1e-9:
                continue
            mid = 0.5 * (a + b)
            if not on_chord(mid):
                continue
            d = b - a
            nrm = np.array([-d[1], d[0]]) / math.hypot(*d) * 1e-7
            for off in (mid + nrm, mid - nrm):
                for qi, other in enumerate(pieces):
                    if qi != pi and _point_in_convex(other, off):
                        x, y = labels[piece_region[pi]], labels[piece_region[qi]]
                        if x != y:
                            adjacency.add(tuple(sorted((x, y))))

    incidences: dict[str, set[str]] = {l: set() for l in labels}
    for name, given in (marked or {}).items():
        copies = [c for x in given for c in side_copies(domain, x)]
        for x in copies:
            for pi, poly in enumerate(pieces):
                if any(math.hypot(*(x - w)) < 1e-8 for w in poly):
                    incidences[labels[piece_region[pi]]].add(name)
    return RegionDecomposition(pieces, piece_region, labels, adjacency, incidences,
                               [(c.start, c.end, c.curve) for c in chords])


def curves_for(group):
    """``(group, curves, regions)`` for any supported group.

    The returned group may be a twisted replacement (see :func:`b_curves`).
    """
    sig = group.signature
    if len(sig) == 4:
        fc = b_curves(group)
        return fc.group, [fc.b1, fc.b2], fc.regions
    if sig[0] == 2:
        h = h_curve(group)
        return group, [h], region_map(group.domain, h.chords, h.marked_points)
    b = billiard3(group)
    return group, [b], region_map(group.domain, b.chords, b.marked_points)
