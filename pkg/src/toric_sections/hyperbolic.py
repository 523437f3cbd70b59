"""Numeric hyperbolic-plane geometry.

Points and isometries live in the upper half-plane. Orientation-reversing
isometries are stored as ``(g, True)`` and act by ``z -> g(-conj(z))``.
For tracing and clipping, points are also mapped to the Klein disk, where
geodesics are straight chords and isometries act as 3x3 Lorentz matrices.

Klein coordinates ``(k1, k2)`` come from the hyperboloid vector of the
symmetric matrix ``(1/y) [[|z|^2, x], [x, 1]]``; ``i`` goes to the centre
and ``oo`` to ``(0, 1)``. The map preserves orientation.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .retmap import BadSignature, HYPERBOLIC, geometry_type

TOL_GEOM = 1e-10
TOL_RELATION = 1e-9
TOL_DET = 1e-12
_Y_FLOOR = 1e-300


class NotHyperbolicIsometry(ValueError):
    pass


class AngleSum(ValueError):
    pass


class RootFindFailed(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# points


@dataclass(frozen=True)
class HPoint:
    x: float
    y: float

    def __post_init__(self):
        if not (self.y > _Y_FLOOR) or not math.isfinite(self.x) or not math.isfinite(self.y):
            raise ValueError(f"({self.x}, {self.y}) is not in the upper half-plane")

    @classmethod
    def from_complex(cls, z: complex) -> "HPoint":
        return cls(z.real, z.imag)

    @property
    def z(self) -> complex:
        return complex(self.x, self.y)

    def klein(self) -> np.ndarray:
        return klein_from_uhp(self.z)


def distance(u: HPoint, v: HPoint) -> float:
    return 2.0 * math.asinh(abs(u.z - v.z) / (2.0 * math.sqrt(u.y * v.y)))


def direction_between(u: HPoint, v: HPoint) -> float:
    """Euclidean angle at ``u`` of the geodesic ray from ``u`` to ``v``."""
    w = (v.z - u.x) / u.y
    return cmath.phase((w - 1j) / (w + 1j)) + math.pi / 2


def exp_map(u: HPoint, angle: float, dist: float) -> HPoint:
    """Point at distance ``dist`` from ``u`` along direction ``angle``."""
    w = math.tanh(dist / 2) * cmath.exp(1j * (angle - math.pi / 2))
    z = 1j * (1 + w) / (1 - w)
    return HPoint.from_complex(u.y * z + u.x)


def wrap_angle(a: float) -> float:
    """Wrap to ``(-pi, pi]``."""
    a = math.fmod(a, 2 * math.pi)
    if a <= -math.pi:
        a += 2 * math.pi
    elif a > math.pi:
        a -= 2 * math.pi
    return a


def interior_angle(prev: HPoint, v: HPoint, nxt: HPoint) -> float:
    return abs(wrap_angle(direction_between(v, nxt) - direction_between(v, prev)))


# ---------------------------------------------------------------------------
# Klein / hyperboloid


def hyperboloid_from_uhp(z: complex) -> np.ndarray:
    x, y = z.real, z.imag
    r2 = x * x + y * y
    return np.array([x / y, (r2 - 1) / (2 * y), (r2 + 1) / (2 * y)])


def klein_from_uhp(z: complex) -> np.ndarray:
    h = hyperboloid_from_uhp(z)
    return h[:2] / h[2]


def uhp_from_klein(k) -> HPoint:
    k1, k2 = float(k[0]), float(k[1])
    n2 = k1 * k1 + k2 * k2
    if n2 >= 1:
        raise ValueError(f"Klein point {k} is not inside the disk")
    t = 1 / math.sqrt(1 - n2)
    x2, x1 = k1 * t, k2 * t  # (x/y, (|z|^2-1)/2y)
    y = 1 / (t - x1)
    return HPoint(x2 * y, y)


def klein_from_boundary(xi: float) -> np.ndarray:
    """Ideal point on the unit circle for a boundary real (or ``inf``)."""
    if math.isinf(xi):
        return np.array([0.0, 1.0])
    d = xi * xi + 1
    return np.array([2 * xi / d, (xi * xi - 1) / d])


def boundary_from_klein(k) -> float:
    k1, k2 = float(k[0]), float(k[1])
    if abs(1 - k2) < 1e-15:
        return math.inf
    return k1 / (1 - k2)


def minkowski(a: np.ndarray, b: np.ndarray) -> float:
    return float(a[0] * b[0] + a[1] * b[1] - a[2] * b[2])


def klein_distance(k, l) -> float:
    k = np.asarray(k, float)
    l = np.asarray(l, float)
    num = 1 - float(k @ l)
    den = math.sqrt(max((1 - float(k @ k)) * (1 - float(l @ l)), 1e-300))
    # cosh d - 1 without cancellation: num^2 - den^2 = |l-k|^2 - (k x (l-k))^2
    w = l - k
    cr = k[0] * w[1] - k[1] * w[0]
    excess = max(float(w @ w) - cr * cr, 0.0) / (den * (num + den))
    return 2 * math.asinh(math.sqrt(excess / 2))


def klein_line_normal(e1, e2) -> np.ndarray:
    """Unit spacelike normal of the geodesic through Klein points ``e1, e2``."""
    a = np.array([e1[0], e1[1], 1.0])
    b = np.array([e2[0], e2[1], 1.0])
    n = np.cross(a, b)
    n = np.array([n[0], n[1], -n[2]])  # raise index: <n, a> = 0
    return n / math.sqrt(minkowski(n, n))


def klein_point_line_distance(k, n: np.ndarray) -> float:
    """Hyperbolic distance from Klein point ``k`` to the line with normal ``n``."""
    k = np.asarray(k, float)
    p = np.array([k[0], k[1], 1.0]) / math.sqrt(1 - float(k @ k))
    return math.asinh(abs(minkowski(p, n)))


def to_disk(k) -> complex:
    """Klein to Poincare disk (for rendering)."""
    k = np.asarray(k, float)
    return complex(*k) / (1 + math.sqrt(max(1 - float(k @ k), 0.0)))


# ---------------------------------------------------------------------------
# isometries

_J = np.array([[1.0, 0.0], [0.0, -1.0]])


def _normalize(m: np.ndarray) -> np.ndarray:
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    if det <= 0:
        raise ValueError(f"matrix with nonpositive determinant {det}")
    return m / math.sqrt(det)


@dataclass(frozen=True, eq=False)
class Isometry:
    """``z -> m(z)`` or, when ``reversing``, ``z -> m(-conj z)``."""

    m: np.ndarray
    reversing: bool = False

    def __post_init__(self):
        m = np.array(self.m, dtype=float).reshape(2, 2)
        object.__setattr__(self, "m", _normalize(m))

    @classmethod
    def identity(cls) -> "Isometry":
        return cls(np.eye(2))

    def __matmul__(self, other: "Isometry") -> "Isometry":
        h = other.m
        if self.reversing:
            h = _J @ h @ _J
        return Isometry(self.m @ h, self.reversing != other.reversing)

    def inverse(self) -> "Isometry":
        a, b, c, d = self.m.ravel()
        inv = np.array([[d, -b], [-c, a]])
        if self.reversing:
            inv = _J @ inv @ _J
        return Isometry(inv, self.reversing)

    def __pow__(self, n: int) -> "Isometry":
        base = self if n >= 0 else self.inverse()
        out = Isometry.identity()
        for _ in range(abs(n)):
            out = out @ base
        return out

    def act(self, z: complex) -> complex:
        if self.reversing:
            z = -z.conjugate()
        a, b, c, d = self.m.ravel()
        return (a * z + b) / (c * z + d)

    def act_boundary(self, xi: float) -> float:
        if self.reversing:
            xi = -xi
        a, b, c, d = self.m.ravel()
        if math.isinf(xi):
            return math.inf if c == 0 else a / c
        den = c * xi + d
        if den == 0:
            return math.inf
        return (a * xi + b) / den

    @property
    def det(self) -> float:
        m = self.m
        return float(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])

    @property
    def trace(self) -> float:
        return float(self.m[0, 0] + self.m[1, 1])

    def lorentz(self) -> np.ndarray:
        """3x3 matrix acting on hyperboloid vectors ``(k1, k2, t)``."""
        G = self.m @ _J if self.reversing else self.m
        cols = []
        for v in np.eye(3):
            k1, k2, t = v
            M = np.array([[t + k2, k1], [k1, t - k2]])
            N = G @ M @ G.T
            cols.append([N[0, 1], (N[0, 0] - N[1, 1]) / 2, (N[0, 0] + N[1, 1]) / 2])
        return np.array(cols).T

    def to_json(self) -> dict:
        return {"matrix": self.m.tolist(), "reversing": self.reversing}


def apply(g: Isometry, u: HPoint) -> HPoint:
    return HPoint.from_complex(g.act(u.z))


def apply_klein(L: np.ndarray, k) -> np.ndarray:
    v = L @ np.array([k[0], k[1], 1.0])
    return v[:2] / v[2]


def projective_residual(g: Isometry, h: Isometry) -> float:
    """Max entry difference up to sign; ``inf`` if orientations differ."""
    if g.reversing != h.reversing:
        return math.inf
    return float(min(np.max(np.abs(g.m - h.m)), np.max(np.abs(g.m + h.m))))


def identity_residual(g: Isometry) -> float:
    return projective_residual(g, Isometry.identity())


def _to_point(u) -> HPoint:
    return u if isinstance(u, HPoint) else HPoint.from_complex(complex(u))


def _lift_to(u: HPoint) -> np.ndarray:
    """Affine map sending ``i`` to ``u``."""
    s = math.sqrt(u.y)
    return np.array([[s, u.x / s], [0.0, 1 / s]])


def rotation_about(center: HPoint, angle: float) -> Isometry:
    """Counterclockwise rotation by ``angle`` about ``center``."""
    c, s = math.cos(angle / 2), math.sin(angle / 2)
    R = np.array([[c, s], [-s, c]])
    T = _lift_to(center)
    return Isometry(T @ R @ np.linalg.inv(T))


def translation_along_imaginary(dist: float) -> Isometry:
    e = math.exp(dist / 2)
    return Isometry(np.diag([e, 1 / e]))


@dataclass(frozen=True)
class GeodesicLine:
    """Oriented geodesic from ``start`` to ``end`` (boundary reals or inf)."""

    start: float
    end: float

    def __post_init__(self):
        if self.start == self.end:
            raise ValueError("geodesic endpoints must differ")

    def klein_endpoints(self) -> tuple[np.ndarray, np.ndarray]:
        return klein_from_boundary(self.start), klein_from_boundary(self.end)

    def normal(self) -> np.ndarray:
        return klein_line_normal(*self.klein_endpoints())

    def distance_to(self, u: HPoint) -> float:
        return klein_point_line_distance(u.klein(), self.normal())

    def reversed(self) -> "GeodesicLine":
        return GeodesicLine(self.end, self.start)


def geodesic_through(u: HPoint, v: HPoint) -> GeodesicLine:
    """Geodesic through ``u`` and ``v``, oriented from ``u`` to ``v``."""
    if abs(u.x - v.x) < 1e-14 * max(1.0, abs(u.x)):
        return GeodesicLine(u.x, math.inf) if v.y > u.y else GeodesicLine(math.inf, u.x)
    c = (abs(u.z) ** 2 - abs(v.z) ** 2) / (2 * (u.x - v.x))
    rho = abs(u.z - c)
    lo, hi = c - rho, c + rho
    return GeodesicLine(lo, hi) if v.x > u.x else GeodesicLine(hi, lo)


def reflection_through(u: HPoint, v: HPoint) -> Isometry:
    """Reflection in the geodesic through ``u`` and ``v``."""
    if abs(u.x - v.x) < 1e-14 * max(1.0, abs(u.x)):
        x0 = (u.x + v.x) / 2
        return Isometry(np.array([[1.0, 2 * x0], [0.0, 1.0]]), True)
    c = (abs(u.z) ** 2 - abs(v.z) ** 2) / (2 * (u.x - v.x))
    rho = abs(u.z - c)
    return Isometry(np.array([[c, c * c - rho * rho], [1.0, c]]) / rho, True)


def axis_of(g: Isometry) -> tuple[GeodesicLine, float]:
    """Axis (repelling -> attracting) and translation length of ``g``."""
    if g.reversing:
        raise NotHyperbolicIsometry("orientation-reversing isometry")
    a, b, c, d = g.m.ravel()
    tr = a + d
    if abs(tr) <= 2:
        raise NotHyperbolicIsometry(f"|trace| = {abs(tr)} <= 2")
    length = 2 * math.acosh(abs(tr) / 2)
    if abs(c) < 1e-15 * max(1.0, abs(a), abs(d)):
        fixed = b / (d - a)
        return (GeodesicLine(fixed, math.inf) if abs(a) > abs(d)
                else GeodesicLine(math.inf, fixed)), length
    disc = math.sqrt((d - a) ** 2 + 4 * b * c)
    x1 = (a - d + disc) / (2 * c)
    x2 = (a - d - disc) / (2 * c)
    if abs(c * x1 + d) > 1:  # derivative 1/(c x + d)^2 < 1: attracting
        return GeodesicLine(x2, x1), length
    return GeodesicLine(x1, x2), length


# ---------------------------------------------------------------------------
# polygons


@dataclass
class PolygonPatch:
    vertices: list[HPoint]
    labels: list[str]
    angles: list[float]  # prescribed interior angles

    def interior_angles(self) -> list[float]:
        n = len(self.vertices)
        return [interior_angle(self.vertices[i - 1], self.vertices[i], self.vertices[(i + 1) % n])
                for i in range(n)]

    def angle_error(self) -> float:
        return max(abs(a - b) for a, b in zip(self.interior_angles(), self.angles))

    def side_lengths(self) -> list[float]:
        n = len(self.vertices)
        return [distance(self.vertices[i], self.vertices[(i + 1) % n]) for i in range(n)]

    def vertex(self, label: str) -> HPoint:
        return self.vertices[self.labels.index(label)]


def side_from_angles(opposite: float, b: float, c: float) -> float:
    """Side opposite angle ``opposite`` (angle law of cosines)."""
    ch = (math.cos(opposite) + math.cos(b) * math.cos(c)) / (math.sin(b) * math.sin(c))
    return math.acosh(max(ch, 1.0))


def triangle_from_angles(A: float, B: float, C: float) -> PolygonPatch:
    """Triangle PQR with angles A, B, C at P, Q, R.

    P sits at ``i``, Q above it on the imaginary axis, R to the right.
    """
    # pi/2 + pi/3 + pi/6 rounds to just below pi
    if min(A, B, C) <= 0 or A + B + C >= math.pi * (1 - 1e-14):
        raise AngleSum(f"angles {A}, {B}, {C} must be positive with sum < pi")
    c = side_from_angles(C, A, B)  # |PQ|
    b = side_from_angles(B, A, C)  # |PR|
    P = HPoint(0.0, 1.0)
    Q = HPoint(0.0, math.exp(c))
    R = exp_map(P, math.pi / 2 - A, b)
    return PolygonPatch([P, Q, R], ["P", "Q", "R"], [A, B, C])


def _triangle_pair_mismatch(q1, p, q, r, s1, s2):
    a1 = side_from_angles(math.pi / p, q1, s1)
    a2 = side_from_angles(math.pi / r, math.pi / q - q1, s2)
    return a1 - a2


def quad_from_angles(p: int, q: int, r: int, s: int) -> PolygonPatch:
    """Quadrilateral PQRS with angles pi/p, pi/q, pi/r, pi/s.

    Glued from triangles PQS and QRS along the diagonal QS. The angle at S
    is split in half; the split at Q is found by bisection so both
    triangles give the same diagonal.
    """
    if 1 / p + 1 / q + 1 / r + 1 / s >= 2:
        raise AngleSum(f"angle sum of ({p},{q},{r},{s}) is not below 2 pi")
    s1 = s2 = math.pi / (2 * s)
    lo = max(0.0, math.pi / q - (math.pi - math.pi / r - s2))
    hi = min(math.pi / q, math.pi - math.pi / p - s1)
    if not lo < hi:
        raise RootFindFailed("empty bracket for the diagonal split")
    a, b = lo + (hi - lo) * 1e-12, hi - (hi - lo) * 1e-12
    fa = _triangle_pair_mismatch(a, p, q, r, s1, s2)
    fb = _triangle_pair_mismatch(b, p, q, r, s1, s2)
    if fa * fb > 0:
        raise RootFindFailed("diagonal mismatch does not change sign")
    for _ in range(200):
        m = 0.5 * (a + b)
        fm = _triangle_pair_mismatch(m, p, q, r, s1, s2)
        if fm == 0 or b - a < 1e-16:
            break
        if fa * fm < 0:
            b = m
        else:
            a, fa = m, fm
    q1 = 0.5 * (a + b)
    q2 = math.pi / q - q1
    tri = triangle_from_angles(math.pi / p, q1, s1)
    P, Q, S = tri.vertices
    qs_dir = direction_between(Q, S)
    qp_dir = direction_between(Q, P)
    sign = -1.0 if wrap_angle(qp_dir - qs_dir) > 0 else 1.0
    qr_len = side_from_angles(s2, q2, math.pi / r)
    R = exp_map(Q, qs_dir + sign * q2, qr_len)
    return PolygonPatch([P, Q, R, S], ["P", "Q", "R", "S"],
                        [math.pi / p, math.pi / q, math.pi / r, math.pi / s])


# ---------------------------------------------------------------------------
# fundamental domains


class Domain:
    """Convex fundamental polygon with side pairings.

    Side ``i`` runs from vertex ``i`` to vertex ``i+1`` (counterclockwise in
    Klein coordinates). ``pairing[i]`` maps the partner side onto side ``i``
    and carries the domain across side ``i``.
    """

    def __init__(self, vertices: Sequence[HPoint], labels: Sequence[str],
                 cones: Sequence[str], angles: Sequence[float]):
        verts = list(vertices)
        labels, cones, angles = list(labels), list(cones), list(angles)
        k = np.array([v.klein() for v in verts])
        area = 0.5 * sum(k[i - 1, 0] * k[i, 1] - k[i, 0] * k[i - 1, 1] for i in range(len(k)))
        if area < 0:
            verts.reverse(), labels.reverse(), cones.reverse(), angles.reverse()
            k = k[::-1].copy()
        self.vertices = verts
        self.labels = labels
        self.cones = cones
        self.angles = angles
        self.klein = k
        self.n = len(verts)
        self.partner: list[int] = [-1] * self.n
        self.pairing: list[Isometry | None] = [None] * self.n
        self.lorentz: list[np.ndarray] = [np.eye(3)] * self.n
        self.lorentz_inv: list[np.ndarray] = [np.eye(3)] * self.n

    def side_index(self, a: str, b: str) -> int:
        for i in range(self.n):
            j = (i + 1) % self.n
            if {self.labels[i], self.labels[j]} == {a, b}:
                return i
        raise KeyError(f"no side {a}{b}")

    def side_label(self, i: int) -> str:
        return self.labels[i] + self.labels[(i + 1) % self.n]

    def pair(self, i: int, j: int, g: Isometry) -> None:
        """Register ``g`` mapping side ``j`` onto side ``i``."""
        self.partner[i], self.partner[j] = j, i
        self.pairing[i], self.pairing[j] = g, g.inverse()
        for idx in (i, j):
            L = self.pairing[idx].lorentz()
            self.lorentz[idx] = L
            self.lorentz_inv[idx] = np.linalg.inv(L)

    def pair_by_rotation(self, i: int, j: int, rot: Isometry) -> None:
        """Pair with whichever of ``rot``, ``rot^-1`` maps side j onto side i."""
        best = None
        for g in (rot, rot.inverse()):
            res = self._pair_error(i, j, g)
            if best is None or res < best[0]:
                best = (res, g)
        self.pair(i, j, best[1])

    def _pair_error(self, i, j, g) -> float:
        vi, vi1 = self.vertices[i], self.vertices[(i + 1) % self.n]
        vj, vj1 = self.vertices[j], self.vertices[(j + 1) % self.n]
        return max(distance(apply(g, vj), vi1), distance(apply(g, vj1), vi))

    def pairing_error(self) -> float:
        return max(self._pair_error(i, self.partner[i], self.pairing[i]) for i in range(self.n))

    def angle_error(self) -> float:
        n = self.n
        got = [interior_angle(self.vertices[i - 1], self.vertices[i], self.vertices[(i + 1) % n])
               for i in range(n)]
        return max(abs(a - b) for a, b in zip(got, self.angles))

    # Klein-side helpers ----------------------------------------------------

    def side_value(self, i: int, k) -> float:
        """Positive inside, zero on side ``i``."""
        a = self.klein[i]
        b = self.klein[(i + 1) % self.n]
        return float((b[0] - a[0]) * (k[1] - a[1]) - (b[1] - a[1]) * (k[0] - a[0]))

    def contains(self, k, tol: float = 0.0) -> bool:
        return all(self.side_value(i, k) >= -tol for i in range(self.n))

    def centroid(self) -> np.ndarray:
        return self.klein.mean(axis=0)

    def reduce_point(self, k, max_steps: int = 10_000) -> tuple[np.ndarray, np.ndarray]:
        """Move a Klein point into the domain; returns ``(point, L)``.

        ``L`` is the accumulated Lorentz matrix (point = L @ original).
        Walks the segment from the centroid to the point, crossing sides.
        """
        k = np.asarray(k, float)
        L = np.eye(3)
        x = self.centroid()
        skip = None
        for _ in range(max_steps):
            d = k - x
            best = None
            for i in range(self.n):
                if i == skip:
                    continue
                a, b = self.klein[i], self.klein[(i + 1) % self.n]
                e = b - a
                cr = e[0] * d[1] - e[1] * d[0]
                if cr >= 0:
                    continue
                s_exit = -(e[0] * (x[1] - a[1]) - e[1] * (x[0] - a[0])) / cr
                if best is None or s_exit < best[0]:
                    best = (s_exit, i)
            if best is None or best[0] >= 1.0:
                return k, L
            s_exit, i = best
            y = x + s_exit * d
            x = apply_klein(self.lorentz_inv[i], y)
            k = apply_klein(self.lorentz_inv[i], k)
            L = self.lorentz_inv[i] @ L
            skip = self.partner[i]
        raise RuntimeError("point reduction did not terminate")

    def cone_vertex_indices(self, cone: str) -> list[int]:
        return [i for i, c in enumerate(self.cones) if c == cone]

    def diameter(self) -> float:
        return max(klein_distance(a, b) for a in self.klein for b in self.klein)


# ---------------------------------------------------------------------------
# groups


def _check_hyperbolic(sig: Sequence[int]) -> None:
    if geometry_type(sig) != HYPERBOLIC:
        raise BadSignature(f"signature {tuple(sig)} is not hyperbolic")


@dataclass
class TriangleGroup:
    signature: tuple[int, int, int]
    triangle: PolygonPatch
    reflections: dict[str, Isometry]
    rotations: dict[str, Isometry]  # x at P, y at Q, z at R
    domain: Domain
    p_bar: HPoint

    def relation_residual(self) -> float:
        p, q, r = self.signature
        x, y, z = (self.rotations[k] for k in "xyz")
        return max(identity_residual(x ** p), identity_residual(y ** q),
                   identity_residual(z ** r), identity_residual(x @ y @ z))

    def vertex(self, label: str) -> HPoint:
        return self.triangle.vertex(label)


def triangle_group(p: int, q: int, r: int) -> TriangleGroup:
    sig = (p, q, r)
    _check_hyperbolic(sig)
    tri = triangle_from_angles(math.pi / p, math.pi / q, math.pi / r)
    P, Q, R = tri.vertices
    refl = {"PQ": reflection_through(P, Q), "QR": reflection_through(Q, R),
            "RP": reflection_through(R, P)}
    rot = {"x": refl["RP"] @ refl["PQ"], "y": refl["PQ"] @ refl["QR"],
           "z": refl["QR"] @ refl["RP"]}
    p_bar = apply(refl["QR"], P)
    dom = Domain([P, Q, p_bar, R], ["P", "Q", "P'", "R"], ["P", "Q", "P", "R"],
                 [math.pi / p, 2 * math.pi / q, math.pi / p, 2 * math.pi / r])
    dom.pair_by_rotation(dom.side_index("P", "Q"), dom.side_index("Q", "P'"), rot["y"])
    dom.pair_by_rotation(dom.side_index("P'", "R"), dom.side_index("R", "P"), rot["z"])
    return TriangleGroup(sig, tri, refl, rot, dom, p_bar)


@dataclass
class QuadGroup:
    signature: tuple[int, int, int, int]
    quad: PolygonPatch
    reflections: dict[str, Isometry]
    rotations: dict[str, Isometry]  # keyed by vertex label
    domain: Domain

    def relation_residual(self) -> float:
        res = [identity_residual(self.rotations[v] ** n)
               for v, n in zip("PQRS", self.signature)]
        prod = self.rotations["P"] @ self.rotations["Q"] @ self.rotations["R"] @ self.rotations["S"]
        return max(res + [identity_residual(prod)])

    def vertex(self, label: str) -> HPoint:
        return self.quad.vertex(label)


def quad_group(p: int, q: int, r: int, s: int) -> QuadGroup:
    sig = (p, q, r, s)
    _check_hyperbolic(sig)
    quad = quad_from_angles(p, q, r, s)
    P, Q, R, S = quad.vertices
    refl = {"PQ": reflection_through(P, Q), "QR": reflection_through(Q, R),
            "RS": reflection_through(R, S), "SP": reflection_through(S, P)}
    rot = {"P": refl["SP"] @ refl["PQ"], "Q": refl["PQ"] @ refl["QR"],
           "R": refl["QR"] @ refl["RS"], "S": refl["RS"] @ refl["SP"]}
    P2 = apply(refl["QR"], P)
    S2 = apply(refl["QR"], S)
    dom = Domain([P, Q, P2, S2, R, S], ["P", "Q", "P'", "S'", "R", "S"],
                 ["P", "Q", "P", "S", "R", "S"],
                 [math.pi / p, 2 * math.pi / q, math.pi / p, math.pi / s,
                  2 * math.pi / r, math.pi / s])
    dom.pair_by_rotation(dom.side_index("P", "Q"), dom.side_index("Q", "P'"), rot["Q"])
    dom.pair_by_rotation(dom.side_index("S'", "R"), dom.side_index("R", "S"), rot["R"])
    dom.pair_by_rotation(dom.side_index("S", "P"), dom.side_index("P'", "S'"),
                         refl["SP"] @ refl["QR"])
    return QuadGroup(sig, quad, refl, rot, dom)


def group_for(sig: Sequence[int]):
    return triangle_group(*sig) if len(sig) == 3 else quad_group(*sig)


# ---------------------------------------------------------------------------
# twisted representative for four cone points


def segment_isometry(a0: HPoint, b0: HPoint, a1: HPoint, b1: HPoint) -> Isometry:
    """Orientation-preserving isometry sending ``a0 -> a1`` and ray ``a0 b0`` to ``a1 b1``."""

    def normalizer(a, b):
        T = Isometry(np.linalg.inv(_lift_to(a)))
        alpha = direction_between(HPoint(0.0, 1.0), apply(T, b))
        return rotation_about(HPoint(0.0, 1.0), math.pi / 2 - alpha) @ T

    return normalizer(a1, b1).inverse() @ normalizer(a0, b0)


@dataclass
class TwistedQuadGroup:
    """Four-cone-point group from a hexagon that has no mirror symmetry.

    Same signature and hexagon combinatorics as :func:`quad_group`; P and P'
    are rotated about Q by ``twist`` and the remaining shape is re-solved
    so the side pairings still close up.
    """

    signature: tuple[int, int, int, int]
    rotations: dict[str, Isometry]
    domain: Domain
    twist: float

    def relation_residual(self) -> float:
        return max(identity_residual(self.rotations[v] ** n)
                   for v, n in zip("PQRS", self.signature))

    def vertex(self, label: str) -> HPoint:
        return self.domain.vertices[self.domain.labels.index(label)]


def _hexagon(Q, R, phi_p, phi_s, tau, a, b, ups):
    t_qr = direction_between(Q, R)
    t_rq = direction_between(R, Q)
    P = exp_map(Q, t_qr + phi_p + tau, a)
    P2 = exp_map(Q, t_qr - phi_p + tau, a)
    S = exp_map(R, t_rq + phi_s + ups, b)
    S2 = exp_map(R, t_rq - phi_s + ups, b)
    return P, P2, S, S2


def twisted_quad_group(p: int, q: int, r: int, s: int, twist: float = 0.15) -> TwistedQuadGroup:
    from scipy.optimize import fsolve

    base = quad_group(p, q, r, s)
    P0, Q, R, S0 = base.quad.vertices
    phi_p = wrap_angle(direction_between(Q, P0) - direction_between(Q, R))
    phi_s = wrap_angle(direction_between(R, S0) - direction_between(R, Q))

    def mismatch(v):
        a, b, ups = v
        P, P2, S, S2 = _hexagon(Q, R, phi_p, phi_s, twist, a, b, ups)
        return [distance(P, S) - distance(P2, S2),
                interior_angle(S, P, Q) + interior_angle(Q, P2, S2) - 2 * math.pi / p,
                interior_angle(R, S, P) + interior_angle(P2, S2, R) - 2 * math.pi / s]

    x0 = [distance(Q, P0), distance(R, S0), 0.0]
    sol, _, _, msg = fsolve(mismatch, x0, xtol=1e-14, full_output=True)
    if max(abs(v) for v in mismatch(sol)) > 1e-11:
        raise RootFindFailed(f"twisted hexagon did not close: {msg}")
    P, P2, S, S2 = _hexagon(Q, R, phi_p, phi_s, twist, *sol)
    verts = [P, Q, P2, S2, R, S]
    n = len(verts)
    angles = [interior_angle(verts[i - 1], verts[i], verts[(i + 1) % n]) for i in range(n)]
    if max(angles) >= math.pi:
        raise RootFindFailed("twisted hexagon is not convex")
    dom = Domain(verts, ["P", "Q", "P'", "S'", "R", "S"], ["P", "Q", "P", "S", "R", "S"], angles)
    rot_q = rotation_about(Q, 2 * math.pi / q)
    rot_r = rotation_about(R, 2 * math.pi / r)
    dom.pair_by_rotation(dom.side_index("P", "Q"), dom.side_index("Q", "P'"), rot_q)
    dom.pair_by_rotation(dom.side_index("S'", "R"), dom.side_index("R", "S"), rot_r)
    dom.pair(dom.side_index("S", "P"), dom.side_index("P'", "S'"), segment_isometry(P2, S2, P, S))
    # vertex cycles: P -> P' by the Q pairing, then back by the P-S pairing
    to_p2 = min((rot_q, rot_q.inverse()), key=lambda g: distance(apply(g, P), P2))
    to_s2 = min((rot_r, rot_r.inverse()), key=lambda g: distance(apply(g, S), S2))
    back = dom.pairing[dom.side_index("S", "P")]
    rotations = {"P": back @ to_p2, "Q": rot_q, "R": rot_r, "S": back @ to_s2}
    return TwistedQuadGroup((p, q, r, s), rotations, dom, twist)
