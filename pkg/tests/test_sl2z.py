from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from toric_sections.sl2z import (
    CYCLIC,
    CYCLIC_PLUS_EXCHANGE,
    GenWord,
    IsometryType,
    Mat2,
    NotFound,
    NotHyperbolic,
    WordSyntaxError,
    canonical_class,
    classify,
    companion,
    conjugate_test,
    conjugator_solve,
    exchange,
    parse_word,
    positive_factorization,
    word_to_matrix,
)


# plain tuple arithmetic, kept apart from Mat2 on purpose
def mul(m, n):
    a, b, c, d = m
    e, f, g, h = n
    return (a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)


def gen(letter, e):
    base = (1, 1, 0, 1) if letter == "X" else (1, 0, 1, 1)
    if e < 0:
        a, b, c, d = base
        base = (d, -b, -c, a)
    out = (1, 0, 0, 1)
    for _ in range(abs(e)):
        out = mul(out, base)
    return out


def oracle(factors):
    out = (1, 0, 0, 1)
    for g, e in factors:
        out = mul(out, gen(g, e))
    return out


def as_tuple(m: Mat2):
    return (m.a, m.b, m.c, m.d)


def test_mat2_rejects_bad_determinant():
    with pytest.raises(ValueError):
        Mat2(2, 0, 0, 1)


def test_parse_literal_tokens():
    assert parse_word("XY").factors == (("X", 1), ("Y", 1))
    assert parse_word("X^-1YX^6").factors == (("X", -1), ("Y", 1), ("X", 6))


def test_parse_drops_zero_and_merges():
    assert parse_word("X^2.Y.X^0.Y").factors == (("X", 2), ("Y", 2))


@pytest.mark.parametrize("bad", ["XZ", "X^", "X^a", "^2"])
def test_parse_errors_report_position(bad):
    with pytest.raises(WordSyntaxError) as exc:
        parse_word(bad)
    assert exc.value.position >= 0


def test_serialize_round_trip():
    w = parse_word("X^-1YX^6Y^2")
    assert parse_word(w.serialize()) == w


def test_word_matrices():
    assert word_to_matrix(parse_word("X")) == Mat2(1, 1, 0, 1)
    assert word_to_matrix(parse_word("XY")) == Mat2(2, 1, 1, 1)
    m = word_to_matrix(parse_word("YXYX^2Y"))
    assert m == Mat2(7, 5, 11, 8)
    assert m.trace == 15


def test_classify_examples():
    assert classify(Mat2.identity()).tag is IsometryType.IDENTITY
    assert classify(Mat2(2, 1, 1, 1)).tag is IsometryType.HYPERBOLIC
    assert classify(Mat2(0, -1, 1, 0)).tag is IsometryType.ELLIPTIC
    c = classify(word_to_matrix(parse_word("Y^2")))
    assert c.tag is IsometryType.PARABOLIC and c.power == -2 and c.sign == 1
    g, m = c.conjugator, word_to_matrix(parse_word("Y^2"))
    assert g @ m == word_to_matrix(parse_word("X^-2")) @ g


def test_companion_examples():
    assert companion(0)[0] == Mat2(0, -1, 1, 0)
    m, w = companion(2)
    assert m == Mat2(0, -1, 1, 2) == word_to_matrix(parse_word("X^-1YX"))
    assert w == parse_word("X^-1YX")


@pytest.mark.parametrize("t", range(-10, 11))
def test_companion_matches_word(t):
    m, w = companion(t)
    assert as_tuple(m) == (0, -1, 1, t)
    assert as_tuple(w.matrix) == oracle(w.factors)


def test_positive_factorization_examples():
    assert positive_factorization(Mat2(2, 1, 1, 1)) == parse_word("XY")
    pw = positive_factorization(companion(6)[0])
    assert canonical_class(pw) == canonical_class(parse_word("X^4Y"))
    pw = positive_factorization(parse_word("X^2YX^3Y").matrix)
    assert canonical_class(pw).blocks == (2, 3)


def test_positive_factorization_rejects_non_hyperbolic():
    with pytest.raises(NotHyperbolic):
        positive_factorization(Mat2(1, 1, 0, 1))


def test_canonical_class_examples():
    assert canonical_class(parse_word("XYX^3YX^2Y")).blocks == (1, 3, 2)
    assert canonical_class(parse_word("YX")) == canonical_class(parse_word("XY"))
    # (q, r) = (5, 6)
    w = parse_word("X^-1YX^3X^-1YX^2")
    assert canonical_class(w) == canonical_class(parse_word("XYX^2Y"))


def test_exchange_examples():
    assert exchange(parse_word("XY")) == parse_word("YX")
    assert exchange(parse_word("X^2Y^3")) == parse_word("Y^2X^3")


def test_conjugate_test_examples():
    v = conjugate_test(parse_word("XY"), parse_word("YX"))
    assert v.equivalent
    g = v.witness
    assert g @ parse_word("XY").matrix == parse_word("YX").matrix @ g
    assert not conjugate_test(parse_word("X^2Y"), parse_word("X^3Y")).equivalent
    u, w = parse_word("YXYX^2Y"), parse_word("XYXY^2X")
    assert u.matrix.trace == w.matrix.trace == 15
    assert conjugate_test(u, w, CYCLIC_PLUS_EXCHANGE).equivalent


def test_conjugate_test_rejects_elliptic():
    with pytest.raises(NotHyperbolic):
        conjugate_test(Mat2(0, -1, 1, 0), parse_word("XY"))


def test_conjugator_solve_examples():
    m = Mat2(2, 1, 1, 1)
    g = conjugator_solve(m, m)
    assert g @ m == m @ g
    with pytest.raises(NotFound):
        conjugator_solve(parse_word("X^2Y").matrix, parse_word("X^3Y").matrix)


def test_conjugator_solve_distinguishes_equal_traces():
    # both trace 15, different cyclic classes
    a, b = parse_word("X^13Y"), parse_word("YXYX^2Y")
    assert a.matrix.trace == b.matrix.trace
    assert not conjugate_test(a, b, CYCLIC).equivalent
    with pytest.raises(NotFound):
        conjugator_solve(a.matrix, b.matrix)


# ---------------------------------------------------------------------------
# properties

letters = st.sampled_from("XY")
any_factor = st.tuples(letters, st.integers(-10, 10).filter(bool))
pos_factor = st.tuples(letters, st.integers(1, 3))


@given(st.lists(any_factor, max_size=20))
def test_det_one_and_product_oracle(factors):
    w = GenWord(tuple(factors))
    m = word_to_matrix(w)
    assert m.a * m.d - m.b * m.c == 1
    assert as_tuple(m) == oracle(factors)


def positive_words(max_len=6, max_exp=3):
    for k in range(1, max_len + 1):
        for first in "XY":
            for exps in product(range(1, max_exp + 1), repeat=k):
                yield GenWord(tuple(("XY"[(i + (first == "Y")) % 2], e) for i, e in enumerate(exps)))


SMALL = [w for w in positive_words(4) if w.letter_count("X") and w.letter_count("Y")]


@pytest.mark.parametrize("w", SMALL[::7], ids=str)
def test_rotation_invariance(w):
    key = canonical_class(w)
    fs = list(w.factors)
    for i in range(len(fs)):
        r = GenWord(tuple(fs[i:] + fs[:i]))
        assert r.matrix.trace == w.matrix.trace
        assert canonical_class(r) == key


@settings(max_examples=200)
@given(st.lists(pos_factor, min_size=2, max_size=6))
def test_positive_factorization_round_trip(factors):
    w = GenWord(tuple(factors))
    if not (w.letter_count("X") and w.letter_count("Y")):
        return
    pw = positive_factorization(w.matrix)
    assert pw.is_positive
    assert canonical_class(pw) == canonical_class(w)


@given(st.lists(any_factor, max_size=12))
def test_exchange_involution_and_trace(factors):
    w = GenWord(tuple(factors))
    assert exchange(exchange(w)) == w
    assert exchange(w).matrix.trace == w.matrix.trace


@settings(max_examples=150, deadline=None)
@given(st.lists(pos_factor, min_size=2, max_size=5), st.lists(pos_factor, min_size=2, max_size=5))
def test_verdict_consistent_with_solver(f1, f2):
    u, v = GenWord(tuple(f1)), GenWord(tuple(f2))
    for w in (u, v):
        if not (w.letter_count("X") and w.letter_count("Y")):
            return
    if u.matrix.trace != v.matrix.trace:
        return
    verdict = conjugate_test(u, v, CYCLIC, witness=False)
    try:
        g = conjugator_solve(u.matrix, v.matrix)
    except NotFound:
        g = None
    assert verdict.equivalent == (g is not None)
    if g is not None:
        assert g @ u.matrix == v.matrix @ g
