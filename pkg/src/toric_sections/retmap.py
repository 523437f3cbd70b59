"""First-return maps of genus-one sections for spheres with 3 or 4 cone points.

Each hyperbolic (or Euclidean-limit) signature yields a word in X, Y and
an independently computed product of companion step matrices; the two
are checked to be conjugate. :func:`realize` inverts the correspondence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from typing import Sequence

from .sl2z import (
    CYCLIC_PLUS_EXCHANGE,
    GenWord,
    IsometryClass,
    Mat2,
    NotHyperbolic,
    canonical_class,
    classify,
    companion,
    conjugate_test,
    exchange,
    min_rotation,
    positive_factorization,
)


class BadSignature(ValueError):
    pass


class SphericalOrBad(BadSignature):
    pass


class NoBothLetters(ValueError):
    pass


HYPERBOLIC = "hyperbolic"
EUCLIDEAN = "euclidean"
SPHERICAL_OR_BAD = "spherical_or_bad"

FAMILY_Q3 = "Q3"
FAMILY_TWO_Y = "TwoY"
FAMILY_THREE_Y = "ThreeY"
FAMILY_FOUR_Y = "FourY"
_FAMILY_RANK = {FAMILY_Q3: 0, FAMILY_TWO_Y: 1, FAMILY_THREE_Y: 2, FAMILY_FOUR_Y: 3}


def parse_signature(text: str) -> tuple[int, ...]:
    try:
        sig = tuple(int(x) for x in text.replace(" ", "").split(",") if x != "")
    except ValueError as exc:
        raise BadSignature(f"cannot parse signature {text!r}") from exc
    _check_entries(sig)
    return sig


def format_signature(sig: Sequence[int]) -> str:
    return ",".join(str(n) for n in sig)


def _check_entries(sig: Sequence[int]) -> None:
    if len(sig) not in (3, 4):
        raise BadSignature(f"signature must have 3 or 4 entries, got {len(sig)}")
    if any(int(n) != n or n < 2 for n in sig):
        raise BadSignature(f"cone orders must be integers >= 2, got {tuple(sig)}")


def orbifold_chi(sig: Sequence[int]) -> Fraction:
    if any(n < 2 for n in sig):
        raise BadSignature(f"cone orders must be >= 2, got {tuple(sig)}")
    den = math.lcm(*sig)
    return Fraction((2 - len(sig)) * den + sum(den // n for n in sig), den)


def geometry_type(sig: Sequence[int]) -> str:
    chi = orbifold_chi(sig)
    if chi < 0:
        return HYPERBOLIC
    if chi == 0:
        return EUCLIDEAN
    return SPHERICAL_OR_BAD


def family_of(sig: Sequence[int]) -> str:
    """``"2qr"``, ``"pqr"`` or ``"pqrs"``."""
    _check_entries(sig)
    if len(sig) == 4:
        return "pqrs"
    return "2qr" if 2 in sig else "pqr"


def _rotate_two_first(sig: Sequence[int]) -> tuple[int, int, int]:
    i = list(sig).index(2)
    s = tuple(sig[i:]) + tuple(sig[:i])
    return s  # type: ignore[return-value]


def _check_usable(sig: Sequence[int]) -> None:
    _check_entries(sig)
    if geometry_type(sig) == SPHERICAL_OR_BAD:
        raise SphericalOrBad(
            f"signature {format_signature(sig)} is spherical or bad (chi > 0)")


def step_factors(sig: Sequence[int], ordering: Sequence[int] | None = None) -> list[tuple[int, Mat2]]:
    """Companion factors ``(t, M(t))`` in application order.

    The composite map is ``M_last @ ... @ M_first``.
    """
    _check_usable(sig)
    o = tuple(ordering) if ordering is not None else tuple(sig)
    if sorted(o) != sorted(sig):
        raise BadSignature(f"ordering {o} is not a permutation of {tuple(sig)}")
    fam = family_of(sig)
    if fam == "2qr":
        _, q, r = _rotate_two_first(o)
        ts = [q - 2, r - 2]
    elif fam == "pqr":
        p, q, r = o
        ts = [q - 1, p - 1, r - 1]
    else:
        p, q, r, s = o
        ts = [p, s, r, q]
    return [(t, companion(t)[0]) for t in ts]


def step_product(factors: Sequence[tuple[int, Mat2]]) -> Mat2:
    m = Mat2.identity()
    for _, f in factors:
        m = f @ m
    return m


def closed_form_word(sig: Sequence[int], ordering: Sequence[int] | None = None,
                     simplify: bool = True) -> GenWord:
    o = tuple(ordering) if ordering is not None else tuple(sig)
    fam = family_of(sig)
    if fam == "2qr":
        _, q, r = _rotate_two_first(o)
        if simplify and 3 in (q, r):
            other = r if q == 3 else q
            return GenWord.of(("X", other - 6), ("Y", 1))
        return GenWord.of(("X", q - 4), ("Y", 1), ("X", r - 4), ("Y", 1))
    off = 3 if fam == "pqr" else 2
    return GenWord(tuple(f for n in o for f in (("X", n - off), ("Y", 1))))


def necklace_classes(sig: Sequence[int]) -> list[tuple[int, ...]]:
    """Distinct cyclic arrangements, each as its minimal rotation.

    Reflections count as distinct arrangements.
    """
    return sorted({min_rotation(p) for p in permutations(sig)})


@dataclass(frozen=True)
class ReturnMapResult:
    signature: tuple[int, ...]
    ordering: tuple[int, ...]
    section_labels: str
    step_factors: tuple[tuple[int, Mat2], ...]
    word: GenWord
    matrix: Mat2
    trace: int
    isometry_class: IsometryClass

    def to_json(self) -> dict:
        return {
            "signature": format_signature(self.signature),
            "ordering": format_signature(self.ordering),
            "sectionLabels": self.section_labels,
            "stepFactors": [{"t": t, "matrix": m.to_json()} for t, m in self.step_factors],
            "word": self.word.serialize(),
            "matrix": self.matrix.to_json(),
            "trace": str(self.trace),
            "class": self.isometry_class.to_json(),
        }


class FormulaMismatch(AssertionError):
    pass


def _build(sig, ordering, labels) -> ReturnMapResult:
    factors = step_factors(sig, ordering)
    m = step_product(factors)
    word = closed_form_word(sig, ordering)
    wm = word.matrix
    if m.trace != wm.trace:
        raise FormulaMismatch(f"{sig}/{ordering}: traces {m.trace} vs {wm.trace}")
    if m.trace > 2:
        if canonical_class(word) != canonical_class(m):
            raise FormulaMismatch(f"{sig}/{ordering}: closed form not conjugate to step product")
        if family_of(sig) == "2qr":
            general = closed_form_word(sig, ordering, simplify=False)
            if canonical_class(general) != canonical_class(word):
                raise FormulaMismatch(f"{sig}: simplified word not conjugate to general form")
    return ReturnMapResult(tuple(sig), tuple(ordering), labels, tuple(factors),
                           word, m, m.trace, classify(m))


def return_map(sig: Sequence[int], ordering: Sequence[int] | None = None) -> list[ReturnMapResult]:
    """Return maps of the genus-one sections of the orbifold ``sig``.

    One result for ``(2,q,r)``; two for ``(p,q,r)`` (the ordering and its
    reverse); one per necklace class for four cone points, or just the
    given ``ordering``.
    """
    sig = tuple(sig)
    _check_usable(sig)
    return [_build(sig, o, labels) for o, labels in _orderings(sig, ordering)]


def _orderings(sig, ordering=None) -> list[tuple[tuple[int, ...], str]]:
    fam = family_of(sig)
    if fam == "2qr":
        return [(_rotate_two_first(ordering if ordering is not None else sig), "Q→R→Q")]
    if fam == "pqr":
        p, q, r = ordering if ordering is not None else sig
        return [((p, q, r), "A→C→B→A"), ((p, r, q), "A'→C'→B'→A'")]
    orders = [tuple(ordering)] if ordering is not None else necklace_classes(sig)
    return [(o, "A→D→C→B→A") for o in orders]


def section_orderings(sig: Sequence[int]) -> list[tuple[int, ...]]:
    """The orderings ``return_map(sig)`` builds, without building them."""
    sig = tuple(sig)
    _check_usable(sig)
    return [o for o, _ in _orderings(sig)]


# ---------------------------------------------------------------------------
# realizations


@dataclass(frozen=True)
class Realization:
    word: GenWord
    signature: tuple[int, ...]
    family: str
    ordering: tuple[int, ...]
    via_exchange: bool

    def to_json(self) -> dict:
        return {
            "word": self.word.serialize(),
            "signature": format_signature(self.signature),
            "family": self.family,
            "ordering": format_signature(self.ordering),
            "viaExchange": self.via_exchange,
        }


def _candidates(blocks: tuple[int, ...]):
    k = len(blocks)
    for i in range(k):
        a = blocks[i:] + blocks[:i]
        if k == 1 and a[0] >= 1:
            yield FAMILY_Q3, (2, 3, a[0] + 6)
        elif k == 2:
            yield FAMILY_TWO_Y, (2, a[0] + 4, a[1] + 4)
        elif k == 3:
            yield FAMILY_THREE_Y, tuple(x + 3 for x in a)
        elif k == 4:
            yield FAMILY_FOUR_Y, tuple(x + 2 for x in a)


def _positive_word(w: GenWord) -> GenWord:
    if w.is_positive:
        if not (w.letter_count("X") and w.letter_count("Y")):
            raise NoBothLetters(f"{w} does not contain both X and Y")
        return w
    m = w.matrix
    if m.trace <= 2:
        raise NotHyperbolic(f"trace {m.trace} <= 2")
    return positive_factorization(m)


def realize(w: GenWord) -> list[Realization]:
    """Signatures whose section return map realizes the class of ``w``.

    Up to cyclic rotation and exchange of X and Y. Each candidate is
    confirmed against :func:`return_map`. An empty list means no 3- or
    4-point sphere realizes it by these sections.
    """
    pw = _positive_word(w)
    if pw.matrix.trace <= 2:
        raise NotHyperbolic(f"trace {pw.matrix.trace} <= 2")
    key = canonical_class(pw)
    found: dict[tuple, Realization] = {}
    for source in (pw, exchange(pw)):
        blocks = canonical_class(source).blocks
        for family, ordering in _candidates(blocks):
            if geometry_type(ordering) != HYPERBOLIC:
                continue
            if family in (FAMILY_Q3, FAMILY_TWO_Y):
                sig = (2,) + tuple(sorted(ordering[1:]))
                ordering = sig
                dedupe = sig
            else:
                ordering = min_rotation(ordering)
                sig = tuple(sorted(ordering))
                dedupe = ordering
            if dedupe in found:
                continue
            results = return_map(sig, ordering)
            m = results[0].matrix
            if canonical_class(m) == key:
                via = False
            elif conjugate_test(pw, m, CYCLIC_PLUS_EXCHANGE, witness=False).equivalent:
                via = True
            else:
                continue
            found[dedupe] = Realization(
                GenWord(key.word().factors), sig, family, ordering, via)
    return sorted(found.values(),
                  key=lambda r: (_FAMILY_RANK[r.family], r.signature, r.ordering))


def brunella_genus(w: GenWord) -> int | None:
    """``g`` if ``w`` is in the class of ``X^2 (X^2 Y^(g-1))^2``, else None."""
    try:
        key = canonical_class(_positive_word(w), include_exchange=True)
    except (NotHyperbolic, NoBothLetters):
        return None
    letters = sum(key.blocks) + len(key.blocks)  # 6 X and 2(g-1) Y
    if letters % 2 or letters < 8:
        return None
    g = (letters - 6) // 2 + 1
    target = GenWord.of(("X", 4), ("Y", g - 1), ("X", 2), ("Y", g - 1))
    if canonical_class(target, include_exchange=True) == key:
        return g
    return None


def trace_witness(t: int) -> tuple[GenWord, tuple[int, int, int]]:
    if t < 3:
        raise ValueError(f"trace witness needs t >= 3, got {t}")
    return GenWord.of(("X", t - 2), ("Y", 1)), (2, 3, t + 4)


def hyperbolic_signatures(max_entry: int, sizes: Sequence[int] = (3, 4)) -> list[tuple[int, ...]]:
    """Sorted signatures with entries in ``2..max_entry`` and chi < 0."""
    from itertools import combinations_with_replacement

    out = []
    for k in sizes:
        for sig in combinations_with_replacement(range(2, max_entry + 1), k):
            if geometry_type(sig) == HYPERBOLIC:
                out.append(sig)
    return out
