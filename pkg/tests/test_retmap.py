from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from toric_sections.retmap import (
    EUCLIDEAN,
    HYPERBOLIC,
    SPHERICAL_OR_BAD,
    BadSignature,
    NoBothLetters,
    SphericalOrBad,
    brunella_genus,
    closed_form_word,
    geometry_type,
    hyperbolic_signatures,
    necklace_classes,
    orbifold_chi,
    parse_signature,
    realize,
    return_map,
    step_factors,
    step_product,
    trace_witness,
)
from toric_sections.sl2z import GenWord, IsometryType, Mat2, NotHyperbolic, canonical_class, parse_word


def test_orbifold_chi():
    assert orbifold_chi((2, 3, 7)) == Fraction(-1, 42)
    assert orbifold_chi((2, 3, 6)) == 0
    assert orbifold_chi((2, 2, 2, 2)) == 0


def test_geometry_type():
    assert geometry_type((2, 3, 7)) == HYPERBOLIC
    assert geometry_type((2, 4, 4)) == EUCLIDEAN
    assert geometry_type((2, 3, 5)) == SPHERICAL_OR_BAD


@pytest.mark.parametrize("text", ["2,3", "1,3,7", "2,3,x", "2,3,4,5,6"])
def test_parse_signature_rejects(text):
    with pytest.raises(BadSignature):
        parse_signature(text)


def test_step_factors_2qr():
    fs = step_factors((2, 3, 7))
    assert [t for t, _ in fs] == [1, 5]
    assert step_product(fs) == Mat2(0, -1, 1, 5) @ Mat2(0, -1, 1, 1)


def test_step_factors_pqr_and_pqrs():
    assert [t for t, _ in step_factors((3, 4, 5))] == [3, 2, 4]
    # application order p, s, r, q
    assert [t for t, _ in step_factors((2, 2, 3, 3))] == [2, 3, 3, 2]


def test_return_map_figure_eight():
    (res,) = return_map((2, 3, 7))
    assert res.word == parse_word("XY")
    assert res.trace == 3
    assert canonical_class(res.matrix) == canonical_class(Mat2(2, 1, 1, 1))


def test_return_map_three_cone_points():
    results = return_map((3, 4, 5))
    assert [r.word for r in results] == [parse_word("YXYX^2Y"), parse_word("YX^2YXY")]
    assert [r.trace for r in results] == [15, 15]
    assert parse_word("YXYX^2Y").matrix == Mat2(7, 5, 11, 8)


def test_return_map_euclidean_limit():
    (res,) = return_map((2, 4, 4))
    assert res.word == parse_word("Y^2")
    assert abs(res.trace) == 2
    assert res.isometry_class.tag is IsometryType.PARABOLIC


def test_return_map_rejects_spherical():
    with pytest.raises(SphericalOrBad):
        return_map((2, 3, 5))


def test_q3_general_and_simplified_words_agree():
    for r in range(7, 15):
        simple = closed_form_word((2, 3, r))
        general = closed_form_word((2, 3, r), simplify=False)
        assert simple == GenWord.of(("X", r - 6), ("Y", 1))
        assert canonical_class(simple) == canonical_class(general)


def test_necklace_classes():
    assert len(necklace_classes((2, 3, 4, 5))) == 6
    assert necklace_classes((2, 2, 3, 3)) == [(2, 2, 3, 3), (2, 3, 2, 3)]
    assert necklace_classes((3, 3, 3, 3)) == [(3, 3, 3, 3)]
    assert len(return_map((2, 3, 4, 5))) == 6


def test_realize_examples():
    (r,) = realize(parse_word("XY"))
    assert r.signature == (2, 3, 7) and r.family == "Q3"
    got = [(r.signature, r.family, r.via_exchange) for r in realize(parse_word("X^4Y"))]
    assert got == [((2, 3, 10), "Q3", False), ((2, 2, 2, 3), "FourY", True)]
    assert realize(parse_word("X^4Y^4X^2Y^4")) == []
    assert realize(parse_word("X^5Y^5")) == []


def test_realize_errors():
    with pytest.raises(NoBothLetters):
        realize(parse_word("X^3"))
    with pytest.raises(NotHyperbolic):
        realize(parse_word("X^-1Y"))


def test_realize_accepts_non_positive_input():
    # companion form of the 2,3,10 step
    got = realize(parse_word("X^-1YX^5"))
    assert (2, 3, 10) in [r.signature for r in got]


def test_brunella_genus():
    assert brunella_genus(parse_word("X^4Y^4X^2Y^4")) == 5
    assert brunella_genus(parse_word("X^4YX^2Y")) == 2
    assert brunella_genus(parse_word("XY")) is None
    # small g falls under the hypothesis: at most four Y
    assert realize(parse_word("X^4YX^2Y"))
    assert realize(parse_word("X^4Y^2X^2Y^2"))


@pytest.mark.parametrize("t", [3, 4, 10])
def test_trace_witness_examples(t):
    w, sig = trace_witness(t)
    assert w == GenWord.of(("X", t - 2), ("Y", 1))
    assert sig == (2, 3, t + 4)
    assert w.matrix.trace == t


def test_trace_witness_values():
    assert trace_witness(3) == (parse_word("XY"), (2, 3, 7))
    assert trace_witness(4)[0].matrix == Mat2(3, 2, 1, 1)
    with pytest.raises(ValueError):
        trace_witness(2)


def test_euclidean_limits_trace_two():
    for sig in [(2, 3, 6), (2, 4, 4), (3, 3, 3), (2, 2, 2, 2)]:
        for res in return_map(sig):
            assert abs(res.trace) == 2
            assert res.isometry_class.tag is IsometryType.PARABOLIC


def test_hyperbolic_signatures_are_hyperbolic():
    sigs = hyperbolic_signatures(7)
    assert (2, 3, 7) in sigs and (2, 3, 6) not in sigs and (2, 2, 2, 2) not in sigs
    assert all(geometry_type(s) == HYPERBOLIC for s in sigs)


# ---------------------------------------------------------------------------
# properties

SIGS = hyperbolic_signatures(12)


@settings(max_examples=80, deadline=None)
@given(st.sampled_from(SIGS))
def test_return_map_invariants(sig):
    for res in return_map(sig):
        assert res.trace > 2
        assert res.matrix == step_product(res.step_factors)
        assert canonical_class(res.word) == canonical_class(res.matrix)


@settings(max_examples=80, deadline=None)
@given(st.lists(st.integers(0, 6), min_size=1, max_size=4))
def test_realize_only_hyperbolic(blocks):
    w = GenWord(tuple(f for a in blocks for f in (("X", a), ("Y", 1))))
    if not w.letter_count("X") or w.matrix.trace <= 2:
        return
    for r in realize(w):
        assert geometry_type(r.signature) == HYPERBOLIC
        assert canonical_class(return_map(r.signature, r.ordering)[0].matrix, True) == \
            canonical_class(w, True)


@given(st.integers(3, 50))
def test_trace_witness_property(t):
    w, sig = trace_witness(t)
    assert w.matrix.trace == t
    assert geometry_type(sig) == HYPERBOLIC
