import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from toric_sections import sections as S
from toric_sections.retmap import hyperbolic_signatures, return_map, step_factors
from toric_sections.sl2z import Mat2, canonical_class

H = S.H


def test_cw_models():
    for fam, cells, chi, b in [("2qr", (1, 4, 2), -1, 1), ("pqr", (2, 9, 6), -1, 1),
                               ("pqrs", (2, 12, 8), -2, 2)]:
        cw = S.cw_model(fam)
        assert (cw.faces, cw.edges, cw.vertices) == cells
        assert cw.euler_characteristic == chi
        assert cw.boundary_components == b
        assert cw.genus == 1


def test_cw_model_checks_family():
    with pytest.raises(ValueError):
        S.cw_model("2qr", (3, 4, 5))
    with pytest.raises(ValueError):
        S.cw_model("hexagon")


def test_homology_class_arithmetic():
    a = H("a") + 2 * H("b") - H("a")
    assert a == S.HomologyClass.of(b=2)
    assert str(H("x") - 3 * H("y")) == "x - 3y"


def test_four_point_rule_matrix():
    p = 5
    rule = S.TransportRule("phi^A", ("c^AD", "c^AB"), ("c^DC", "c^DA"),
                           {"c^AD": H("c^DA"), "c^AB": H("c^DB") + (p - 1) * H("c^DA")},
                           {"c^DB": H("c^DA") - H("c^DC")})
    assert S.transport_matrix(rule) == Mat2(0, -1, 1, p)


def test_two_point_rule_matrix():
    q = 7
    rule = S.TransportRule("phi^Q", ("c^Q_+", "c^R_-"), ("c^R_+", "c^Q_-"),
                           {"c^Q_+": H("c^Q_-"), "c^R_-": -H("c^R_+") + (q - 2) * H("c^Q_-")})
    assert S.transport_matrix(rule) == Mat2(0, -1, 1, q - 2)


def test_identity_rule():
    rule = S.TransportRule("id", ("a", "b"), ("a2", "b2"), {"a": H("a2"), "b": H("b2")})
    assert S.transport_matrix(rule) == Mat2.identity()


def test_image_outside_span():
    rule = S.TransportRule("bad", ("a", "b"), ("a2", "b2"), {"a": H("a2"), "b": H("z")})
    with pytest.raises(S.ImageOutsideSpan):
        S.transport_matrix(rule)


def test_stored_rules_give_companion_steps():
    assert S.transport_matrix(S.rules_2qr(3, 7)[0]) == Mat2(0, -1, 1, 1)
    assert S.transport_matrix(S.rules_pqr(3, 4, 5)[0]) == Mat2(0, -1, 1, 3)
    assert S.transport_matrix(S.rules_pqrs(2, 2, 3, 3)[0]) == Mat2(0, -1, 1, 2)


def test_compose_route_examples():
    m = S.compose_route((2, 3, 7))
    assert m == Mat2(0, -1, 1, 5) @ Mat2(0, -1, 1, 1)
    assert m.trace == 3
    assert canonical_class(m) == canonical_class(Mat2(2, 1, 1, 1))
    assert S.compose_route((3, 4, 5)).trace == 15


def test_pqrs_relations_have_one_shape():
    for x in S.PQRS_ROUTE:
        (lhs, rhs), = S.relations_pqrs(x).items()
        terms = rhs.as_dict()
        assert sorted(terms.values()) == [-1, 1]
        assert lhs not in terms and set(terms) == set(S.basis_pqrs(x))


SWEEP = hyperbolic_signatures(12)


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(SWEEP))
def test_rules_are_companions(sig):
    for res in return_map(sig):
        rules = S.route_rules(sig, res.ordering)
        ts = [t for t, _ in step_factors(sig, res.ordering)]
        for rule, t in zip(rules, ts):
            m = S.transport_matrix(rule)
            assert m == Mat2(0, -1, 1, t)
            assert m.a * m.d - m.b * m.c == 1
        assert S.route_matches_step_factors(sig, res.ordering)


@given(st.sampled_from(SWEEP))
def test_genus_one_everywhere(sig):
    assert S.cw_model(S.family_of(sig), sig).genus == 1
