"""Exact SL(2,Z) arithmetic.

Words in the generators ``X = [[1,1],[0,1]]`` and ``Y = [[1,0],[1,1]]``,
integer matrices of determinant one, isometry classification, canonical
keys for conjugacy classes of hyperbolic elements and an independent
conjugator solver based on binary quadratic forms.

Words multiply left to right. Everything is arbitrary-precision Python
``int``; nothing here touches floating point.
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterable, Sequence, Union


class WordSyntaxError(ValueError):
    """Raised by :func:`parse_word` on malformed input."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class NotHyperbolic(ValueError):
    pass


class ReductionFailed(RuntimeError):
    pass


class NotFound(LookupError):
    """No conjugator found.

    Absence within ``bound`` is inconclusive unless ``reason`` says
    otherwise (e.g. the traces differ).
    """

    def __init__(self, bound: int, reason: str = "search bound exhausted"):
        super().__init__(f"no conjugator found ({reason}, bound={bound})")
        self.bound = bound
        self.reason = reason


# ---------------------------------------------------------------------------
# matrices


@dataclass(frozen=True)
class Mat2:
    """2x2 integer matrix of determinant 1, entries row-major."""

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        for name in "abcd":
            v = getattr(self, name)
            if type(v) is not int and (isinstance(v, bool) or not isinstance(v, int)):
                raise TypeError(f"entry {name} must be an int, got {v!r}")
        if self.a * self.d - self.b * self.c != 1:
            raise ValueError(f"determinant of {self.rows()} is not 1")

    @classmethod
    def identity(cls) -> "Mat2":
        return cls(1, 0, 0, 1)

    @classmethod
    def from_rows(cls, rows) -> "Mat2":
        (a, b), (c, d) = rows
        return cls(int(a), int(b), int(c), int(d))

    def rows(self) -> list[list[int]]:
        return [[self.a, self.b], [self.c, self.d]]

    @property
    def trace(self) -> int:
        return self.a + self.d

    def __matmul__(self, other: "Mat2") -> "Mat2":
        return Mat2(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def __neg__(self) -> "Mat2":
        return Mat2(-self.a, -self.b, -self.c, -self.d)

    def inverse(self) -> "Mat2":
        return Mat2(self.d, -self.b, -self.c, self.a)

    def __pow__(self, n: int) -> "Mat2":
        base = self if n >= 0 else self.inverse()
        n = abs(n)
        result = Mat2.identity()
        while n:
            if n & 1:
                result = result @ base
            base = base @ base
            n >>= 1
        return result

    def conjugate_by(self, g: "Mat2") -> "Mat2":
        """Return ``g @ self @ g^-1``."""
        return g @ self @ g.inverse()

    def is_scalar(self) -> bool:
        return self.b == 0 and self.c == 0 and self.a == self.d

    def to_json(self) -> list[list[str]]:
        return [[str(self.a), str(self.b)], [str(self.c), str(self.d)]]

    @classmethod
    def from_json(cls, data) -> "Mat2":
        return cls.from_rows([[int(x) for x in row] for row in data])

    def __str__(self):
        return f"[[{self.a},{self.b}],[{self.c},{self.d}]]"


X = Mat2(1, 1, 0, 1)
Y = Mat2(1, 0, 1, 1)
S = Mat2(0, -1, 1, 0)


def gen_power(gen: str, e: int) -> Mat2:
    if gen == "X":
        return Mat2(1, e, 0, 1)
    if gen == "Y":
        return Mat2(1, 0, e, 1)
    raise ValueError(f"unknown generator {gen!r}")


# ---------------------------------------------------------------------------
# words


def _normalize(factors: Iterable[tuple[str, int]]) -> tuple[tuple[str, int], ...]:
    stack: list[tuple[str, int]] = []
    for gen, e in factors:
        if gen not in ("X", "Y"):
            raise ValueError(f"unknown generator {gen!r}")
        e = int(e)
        if e == 0:
            continue
        if stack and stack[-1][0] == gen:
            e += stack.pop()[1]
            if e == 0:
                continue
        stack.append((gen, e))
    return tuple(stack)


@dataclass(frozen=True)
class GenWord:
    """Finite product of generator powers, adjacent factors merged."""

    factors: tuple[tuple[str, int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "factors", _normalize(self.factors))

    @classmethod
    def of(cls, *factors: tuple[str, int]) -> "GenWord":
        return cls(tuple(factors))

    def __mul__(self, other: "GenWord") -> "GenWord":
        return GenWord(self.factors + other.factors)

    def __pow__(self, n: int) -> "GenWord":
        if n < 0:
            return self.inverse() ** (-n)
        return GenWord(self.factors * n)

    def __len__(self):
        return len(self.factors)

    def __iter__(self):
        return iter(self.factors)

    def inverse(self) -> "GenWord":
        return GenWord(tuple((g, -e) for g, e in reversed(self.factors)))

    def exchange(self) -> "GenWord":
        return exchange(self)

    @property
    def is_positive(self) -> bool:
        return all(e > 0 for _, e in self.factors)

    def letter_count(self, gen: str) -> int:
        return sum(abs(e) for g, e in self.factors if g == gen)

    @cached_property
    def matrix(self) -> Mat2:
        return word_to_matrix(self)

    def serialize(self) -> str:
        """Grammar form with ``.`` separators, e.g. ``X^2.Y``."""
        return ".".join(_term(g, e) for g, e in self.factors) or "1"

    def __str__(self):
        return "".join(_term(g, e) for g, e in self.factors) or "1"


def _term(g: str, e: int) -> str:
    return g if e == 1 else f"{g}^{e}"


_TOKEN = re.compile(r"\s*(?:(\.)|([XY])(?:\^(\{)?\s*([+-]?\d+)\s*(\})?)?)")


def parse_word(text: str) -> GenWord:
    """Parse ``term := ("X"|"Y") ("^" int)?`` sequences.

    ``.`` separators and whitespace are ignored; ``X^{-1}`` braces are
    accepted. ``"1"`` or the empty string give the identity word.
    """
    s = text.replace("−", "-")
    if s.strip() in ("", "1"):
        return GenWord()
    pos = 0
    factors = []
    while pos < len(s):
        if s[pos:].strip() == "":
            break
        m = _TOKEN.match(s, pos)
        if m is None or m.end() == pos:
            raise WordSyntaxError(f"unexpected character {s[pos]!r}", pos)
        if m.group(2):
            if m.group(3) and not m.group(5):
                raise WordSyntaxError("unbalanced brace in exponent", m.end())
            if "^" in m.group(0) and m.group(4) is None:
                raise WordSyntaxError("exponent is not an integer", m.end())
            e = int(m.group(4)) if m.group(4) is not None else 1
            factors.append((m.group(2), e))
        pos = m.end()
        # a dangling caret is not matched by the optional group
        if pos < len(s) and s[pos] == "^":
            raise WordSyntaxError("exponent is not an integer", pos + 1)
    return GenWord(tuple(factors))


def word_to_matrix(w: GenWord) -> Mat2:
    result = Mat2.identity()
    for g, e in w.factors:
        result = result @ gen_power(g, e)
    return result


def exchange(w: GenWord) -> GenWord:
    swap = {"X": "Y", "Y": "X"}
    return GenWord(tuple((swap[g], e) for g, e in w.factors))


def companion(t: int) -> tuple[Mat2, GenWord]:
    """The step matrix ``[[0,-1],[1,t]]`` and its word ``X^-1 Y X^(t-1)``."""
    return Mat2(0, -1, 1, t), GenWord.of(("X", -1), ("Y", 1), ("X", t - 1))


# ---------------------------------------------------------------------------
# classification


class IsometryType(str, enum.Enum):
    IDENTITY = "identity"
    MINUS_IDENTITY = "minus_identity"
    ELLIPTIC = "elliptic"
    PARABOLIC = "parabolic"
    HYPERBOLIC = "hyperbolic"


@dataclass(frozen=True)
class IsometryClass:
    tag: IsometryType
    # parabolic only: m is conjugate to sign * X^power
    power: int | None = None
    sign: int | None = None
    conjugator: Mat2 | None = None

    def to_json(self) -> dict:
        out = {"tag": self.tag.value}
        if self.tag is IsometryType.PARABOLIC:
            out["power"] = self.power
            out["sign"] = self.sign
            out["conjugator"] = self.conjugator.to_json() if self.conjugator else None
        return out


def classify(m: Mat2) -> IsometryClass:
    t = m.trace
    if m == Mat2.identity():
        return IsometryClass(IsometryType.IDENTITY)
    if m == -Mat2.identity():
        return IsometryClass(IsometryType.MINUS_IDENTITY)
    if abs(t) < 2:
        return IsometryClass(IsometryType.ELLIPTIC)
    if abs(t) > 2:
        return IsometryClass(IsometryType.HYPERBOLIC)
    sign = 1 if t > 0 else -1
    # m - sign*I = sign*k * (rank one primitive), so |k| is the content
    k = math.gcd(math.gcd(m.a - sign, m.b), math.gcd(m.c, m.d - sign))
    for power in (k, -k):
        target = gen_power("X", power)
        if sign < 0:
            target = -target
        try:
            g = conjugator_solve(m, target)
        except NotFound:
            continue
        return IsometryClass(IsometryType.PARABOLIC, power, sign, g)
    return IsometryClass(IsometryType.PARABOLIC)


# ---------------------------------------------------------------------------
# positive factorization


def _abs_sum(m: Mat2) -> int:
    return abs(m.a) + abs(m.b) + abs(m.c) + abs(m.d)


def _nonneg(m: Mat2) -> bool:
    return m.a >= 0 and m.b >= 0 and m.c >= 0 and m.d >= 0


def _candidate_powers(u: int, v: int, w: int, z: int) -> set[int]:
    """Integer k near the zeros of the entries of a generator conjugate.

    Conjugating by ``X^k`` gives entries ``u + k*z``-style affine terms and
    one quadratic term; the optimum of the absolute sum lies near a zero.
    """
    ks = {-1, 1}
    if z:
        for num in (-u, w):
            q = num / z
            ks.update((math.floor(q), math.ceil(q)))
        # quadratic entry  v + k*(w-u) - k^2*z
        disc = (w - u) ** 2 + 4 * z * v
        if disc >= 0:
            r = math.isqrt(disc)
            for root in ((w - u) + r, (w - u) - r):
                q = root / (2 * z)
                ks.update((math.floor(q), math.ceil(q)))
    ks.discard(0)
    return ks


def _greedy_step(m: Mat2) -> tuple[Mat2, Mat2] | None:
    """Best single conjugation by ``X^k``, ``Y^k`` or ``S``; None if stuck."""
    best = None
    best_sum = _abs_sum(m)
    moves = [gen_power("X", k) for k in _candidate_powers(m.a, m.b, m.d, m.c)]
    # Y^k = transpose of X^k; the roles of b and c swap
    moves += [gen_power("Y", -k) for k in _candidate_powers(m.d, m.c, m.a, m.b)]
    for g in moves:
        r = m.conjugate_by(g)
        s = _abs_sum(r)
        if s < best_sum:
            best, best_sum = (g, r), s
    return best


_BFS_MOVES = (X, X.inverse(), Y, Y.inverse())


def reduce_to_cone(m: Mat2, max_steps: int = 10_000, bfs_depth: int = 12) -> tuple[Mat2, Mat2]:
    """Find ``g`` with ``g m g^-1`` entrywise nonnegative.

    Greedy descent on the entrywise absolute sum, conjugating by powers of
    X and Y and by S; when stuck outside the cone, a breadth-first search
    over conjugating words of length <= ``bfs_depth``.

    Returns ``(g, g m g^-1)``.
    """
    if m.trace <= 2:
        raise NotHyperbolic(f"trace {m.trace} <= 2")
    g = Mat2.identity()
    r = m
    for _ in range(max_steps):
        if _nonneg(r):
            return g, r
        rs = r.conjugate_by(S)
        if _nonneg(rs):
            return S @ g, rs
        step = _greedy_step(r)
        if step is None:
            break
        h, r = step
        g = h @ g
    else:
        raise ReductionFailed(f"greedy reduction exceeded {max_steps} steps")

    frontier = [(Mat2.identity(), r)]
    seen = {r}
    for _ in range(bfs_depth):
        nxt = []
        for h, cur in frontier:
            for mv in _BFS_MOVES:
                h2 = mv @ h
                cand = cur.conjugate_by(mv)
                if cand in seen:
                    continue
                if _nonneg(cand):
                    return h2 @ g, cand
                seen.add(cand)
                nxt.append((h2, cand))
        frontier = nxt
    raise ReductionFailed(f"no nonnegative conjugate within {bfs_depth} BFS steps")


def peel(m: Mat2) -> GenWord:
    """Factor a nonnegative SL(2,Z) matrix as a positive word."""
    if not _nonneg(m):
        raise ValueError(f"{m} has a negative entry")
    factors = []
    a, b, c, d = m.a, m.b, m.c, m.d
    while (a, b, c, d) != (1, 0, 0, 1):
        if a >= c and b >= d:
            n = min(a // c if c else math.inf, b // d if d else math.inf)
            a, b = a - n * c, b - n * d
            factors.append(("X", n))
        elif c >= a and d >= b:
            n = min(c // a if a else math.inf, d // b if b else math.inf)
            c, d = c - n * a, d - n * b
            factors.append(("Y", n))
        else:  # pragma: no cover - impossible for det 1, nonnegative entries
            raise ReductionFailed(f"cannot peel {[[a, b], [c, d]]}")
    return GenWord(tuple(factors))


@lru_cache(maxsize=65536)
def positive_factorization(m: Mat2) -> GenWord:
    """Positive word whose matrix is conjugate to ``m`` (trace > 2)."""
    if m.trace <= 2:
        raise NotHyperbolic(f"trace {m.trace} <= 2")
    _, r = reduce_to_cone(m)
    return peel(r)


# ---------------------------------------------------------------------------
# canonical conjugacy keys


def least_rotation(seq: Sequence) -> int:
    """Booth's algorithm: start index of the lexicographically least rotation."""
    s = list(seq) * 2
    n = len(seq)
    f = [-1] * len(s)
    k = 0
    for j in range(1, len(s)):
        sj = s[j]
        i = f[j - k - 1]
        while i != -1 and sj != s[k + i + 1]:
            if sj < s[k + i + 1]:
                k = j - i - 1
            i = f[i]
        if sj != s[k + i + 1]:
            if sj < s[k]:
                k = j
            f[j - k] = -1
        else:
            f[j - k] = i + 1
    return k % n if n else 0


def min_rotation(seq: Sequence) -> tuple:
    k = least_rotation(seq)
    return tuple(seq[k:]) + tuple(seq[:k])


@dataclass(frozen=True, order=True)
class ConjClassKey:
    """Cyclic block exponents ``(a1..ak)`` of ``X^a1 Y ... X^ak Y``."""

    blocks: tuple[int, ...]
    exchange_closed: bool = False
    sign: int = 1

    def word(self) -> GenWord:
        return GenWord(tuple(f for a in self.blocks for f in (("X", a), ("Y", 1))))

    def to_json(self) -> dict:
        return {"blocks": list(self.blocks), "exchangeClosed": self.exchange_closed,
                "sign": self.sign}


def cyclic_blocks(w: GenWord) -> tuple[int, ...]:
    """Block exponents of a positive word read cyclically (not yet rotated)."""
    if not w.is_positive:
        raise ValueError(f"{w} is not a positive word")
    runs = list(w.factors)
    if len(runs) > 1 and runs[0][0] == runs[-1][0]:
        runs[0] = (runs[0][0], runs[0][1] + runs.pop()[1])
    if not any(g == "Y" for g, _ in runs):
        raise NotHyperbolic(f"{w} has no Y; not hyperbolic")
    start = next((i for i, (g, _) in enumerate(runs) if g == "X"), 0)
    runs = runs[start:] + runs[:start]
    blocks: list[int] = []
    pending = 0
    for g, e in runs:
        if g == "X":
            pending = e
        else:
            blocks.append(pending)
            blocks.extend([0] * (e - 1))
            pending = 0
    return tuple(blocks)


def _positive_representative(w: Union[GenWord, Mat2]) -> tuple[GenWord, int]:
    if isinstance(w, GenWord) and w.is_positive and w.letter_count("X") and w.letter_count("Y"):
        return w, 1
    m = w if isinstance(w, Mat2) else w.matrix
    t = m.trace
    if t > 2:
        return positive_factorization(m), 1
    if t < -2:
        return positive_factorization(-m), -1
    if isinstance(w, GenWord) and w.is_positive and w.factors:
        return w, 1  # single-letter positive word; cyclic_blocks decides
    raise NotHyperbolic(f"trace {t} has |trace| <= 2")


def canonical_class(w: Union[GenWord, Mat2], include_exchange: bool = False) -> ConjClassKey:
    pw, sign = _positive_representative(w)
    key = min_rotation(cyclic_blocks(pw))
    if include_exchange:
        other = min_rotation(cyclic_blocks(exchange(pw)))
        key = min(key, other)
    return ConjClassKey(key, include_exchange, sign)


# ---------------------------------------------------------------------------
# conjugacy test and conjugator solver


CYCLIC = "cyclic"
CYCLIC_PLUS_EXCHANGE = "cyclicPlusExchange"


@dataclass(frozen=True)
class ConjugacyVerdict:
    equivalent: bool
    mode: str
    witness: Mat2 | None = None
    keys: tuple[ConjClassKey, ConjClassKey] | None = field(default=None, compare=False)


def conjugate_test(u, v, mode: str = CYCLIC, witness: bool = True,
                   bound: int = 10_000) -> ConjugacyVerdict:
    """Compare canonical keys; on equivalence optionally solve for a witness.

    ``u`` and ``v`` may be :class:`GenWord` or :class:`Mat2`.
    """
    if mode not in (CYCLIC, CYCLIC_PLUS_EXCHANGE):
        raise ValueError(f"unknown mode {mode!r}")
    ex = mode == CYCLIC_PLUS_EXCHANGE
    ku = canonical_class(u, ex)
    kv = canonical_class(v, ex)
    if ku != kv:
        return ConjugacyVerdict(False, mode, None, (ku, kv))
    g = None
    if witness:
        mu = u if isinstance(u, Mat2) else u.matrix
        mv = v if isinstance(v, Mat2) else v.matrix
        try:
            g = conjugator_solve(mu, mv, bound)
        except NotFound:
            g = None
    return ConjugacyVerdict(True, mode, g, (ku, kv))


def integer_kernel(rows: Sequence[Sequence[int]]) -> list[list[int]]:
    """Z-basis of ``{v in Z^n : A v = 0}`` via unimodular column reduction."""
    m = len(rows)
    n = len(rows[0])
    A = [list(r) for r in rows]
    U = [[int(i == j) for j in range(n)] for i in range(n)]

    def colop(j, k, q):  # column j -= q * column k
        for r in A:
            r[j] -= q * r[k]
        for r in U:
            r[j] -= q * r[k]

    def swap(j, k):
        for r in A:
            r[j], r[k] = r[k], r[j]
        for r in U:
            r[j], r[k] = r[k], r[j]

    piv = 0
    for i in range(m):
        if piv >= n:
            break
        while True:
            nz = [j for j in range(piv, n) if A[i][j] != 0]
            if not nz:
                break
            j0 = min(nz, key=lambda j: abs(A[i][j]))
            swap(piv, j0)
            done = True
            for j in range(piv + 1, n):
                if A[i][j]:
                    colop(j, piv, A[i][j] // A[i][piv])
                    if A[i][j]:
                        done = False
            if done:
                piv += 1
                break
    return [[U[r][j] for r in range(n)] for j in range(piv, n)]


def _rho_representation(a: int, b: int, c: int, bound: int) -> tuple[int, int] | None:
    """Primitive solution of ``a x^2 + b xy + c y^2 = 1`` for D > 0 nonsquare.

    Walks the rho-operator (reduction, then cycle of reduced forms) while
    tracking the transformation; a form with leading coefficient 1 yields
    the representation. Returns None when the cycle closes without one.
    """
    D = b * b - 4 * a * c
    sD = math.isqrt(D)
    M = (1, 0, 0, 1)  # (m00, m01, m10, m11)

    def reduced(a, b):
        # 0 < b < sqrt(D) and sqrt(D) - b < 2|a| < sqrt(D) + b
        if b <= 0 or b > sD:
            return False
        two_a = 2 * abs(a)
        return (two_a + b) ** 2 > D and (two_a <= b or (two_a - b) ** 2 < D)

    start = None
    for _ in range(bound):
        if a == 1:
            return M[0], M[2]
        if c == 1:
            return M[1], M[3]
        if reduced(a, b):
            if start is None:
                start = (a, b, c)
            elif (a, b, c) == start:
                return None
        ac = abs(c)
        if ac > sD:  # |c| > sqrt(D)
            r = (-b) % (2 * ac)
            if r > ac:
                r -= 2 * ac
        else:
            r = sD - ((sD + b) % (2 * ac))
        s = (r + b) // (2 * c)
        a, b, c = c, r, (r * r - D) // (4 * c)
        M = (M[1], -M[0] + s * M[1], M[3], -M[2] + s * M[3])
    return None


def _solve_form_one(A: int, B: int, C: int, bound: int) -> tuple[int, int] | None:
    D = B * B - 4 * A * C
    if D > 0:
        r = math.isqrt(D)
        if r * r != D:
            return _rho_representation(A, B, C, bound)
        box = min(bound, 200)
        for u in range(-box, box + 1):
            for v in range(-box, box + 1):
                if A * u * u + B * u * v + C * v * v == 1:
                    return u, v
        return None
    if D < 0:
        if A <= 0:
            return None
        vmax = math.isqrt(4 * A // -D) + 1
        for v in range(-vmax, vmax + 1):
            # A u^2 + (B v) u + (C v^2 - 1) = 0
            disc = (B * v) ** 2 - 4 * A * (C * v * v - 1)
            if disc < 0:
                continue
            sq = math.isqrt(disc)
            if sq * sq != disc:
                continue
            for num in (-B * v + sq, -B * v - sq):
                if num % (2 * A) == 0:
                    return num // (2 * A), v
        return None
    # degenerate: 4A Q = (2A u + B v)^2
    if A == 0:
        if B == 0 and C == 1:
            return 0, 1
        return None
    if A < 0:
        return None
    s = math.isqrt(4 * A)
    if s * s != 4 * A:
        return None
    g, x0, y0 = _ext_gcd(2 * A, B)
    if s % g:
        return None
    return x0 * (s // g), y0 * (s // g)


def _ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    """Return ``(g, x, y)`` with ``a x + b y = g = gcd(a, b) >= 0``."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def conjugator_solve(m1: Mat2, m2: Mat2, bound: int = 10_000) -> Mat2:
    """Find ``g`` in SL(2,Z) with ``g m1 g^-1 = m2``.

    Solves ``g m1 = m2 g`` over the integers (a rank-2 lattice), then looks
    for a determinant-one vector of the induced binary quadratic form. For
    indefinite forms the search walks the cycle of reduced forms, at most
    ``bound`` steps. The witness is verified by exact multiplication.

    Raises :class:`NotFound` when nothing is found.
    """
    if m1.trace != m2.trace:
        raise NotFound(0, "traces differ")
    if m1.is_scalar() or m2.is_scalar():
        if m1 == m2:
            return Mat2.identity()
        raise NotFound(0, "scalar vs non-scalar")
    a, b, c, d = m1.a, m1.b, m1.c, m1.d
    e, f, g_, h = m2.a, m2.b, m2.c, m2.d
    # unknowns (x, y, z, w) of g = [[x, y], [z, w]]
    rows = [
        [a - e, c, -f, 0],
        [b, d - e, 0, -f],
        [-g_, 0, a - h, c],
        [0, -g_, b, d - h],
    ]
    basis = integer_kernel(rows)
    if len(basis) != 2:  # pragma: no cover - non-scalar with equal trace
        raise NotFound(bound, f"unexpected kernel rank {len(basis)}")
    (x1, y1, z1, w1), (x2, y2, z2, w2) = basis
    A = x1 * w1 - y1 * z1
    C = x2 * w2 - y2 * z2
    B = (x1 + x2) * (w1 + w2) - (y1 + y2) * (z1 + z2) - A - C
    sol = _solve_form_one(A, B, C, bound)
    if sol is None:
        raise NotFound(bound)
    u, v = sol
    gm = Mat2(u * x1 + v * x2, u * y1 + v * y2, u * z1 + v * z2, u * w1 + v * w2)
    if gm @ m1 != m2 @ gm:  # pragma: no cover - guarded by construction
        raise NotFound(bound, "witness failed verification")
    return gm
