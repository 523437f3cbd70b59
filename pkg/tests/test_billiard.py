import math

import numpy as np
import pytest

from toric_sections.billiard import (
    NotAcute,
    _Billiard,
    b_curves,
    billiard3,
    curves_for,
    h_curve,
)
from toric_sections.hyperbolic import distance, quad_group, triangle_group

# expected region tables: cone part -> marked vertices; adjacency pairs
PQR_INCIDENCE = {"P": {"B", "C"}, "Q": {"A", "C"}, "R": {"A", "B"},
                 "orthic1": {"A", "B", "C"}, "orthic2": {"A", "B", "C"}}
PQR_ADJACENCY = {(x, c) for x in "PQR" for c in ("orthic1", "orthic2")}
PQRS_INCIDENCE = {"P": {"A", "B"}, "Q": {"C", "D"}, "R": {"B", "C"}, "S": {"A", "D"},
                  "T1": set("ABCD"), "T2": set("ABCD")}
PQRS_ADJACENCY = {(x, c) for x in "PQRS" for c in ("T1", "T2")}


@pytest.mark.parametrize("sig", [(2, 3, 7), (2, 4, 5)])
def test_h_curve(sig):
    g = triangle_group(*sig)
    h = h_curve(g)
    assert h.closure_error <= 1e-9
    P, Pb = g.vertex("P"), g.p_bar
    assert h.axis.distance_to(P) <= 1e-9
    assert h.axis.distance_to(Pb) <= 1e-9
    assert h.length == pytest.approx(2 * distance(P, Pb), abs=1e-9)


def test_h_curve_needs_order_two():
    with pytest.raises(ValueError):
        h_curve(triangle_group(3, 4, 5))


def test_billiard_equilateral_midpoints():
    b = billiard3(triangle_group(4, 4, 4))
    lengths = _Billiard(triangle_group(4, 4, 4).triangle).lengths
    for t, L in zip(b.bounce_params, lengths):
        assert t == pytest.approx(L / 2, abs=1e-9)
    # the 3-fold symmetry permutes the bounce points, so all three legs agree
    A, B, C = (b.bounce_points[k] for k in "ABC")
    legs = [distance(A, B), distance(B, C), distance(C, A)]
    assert max(legs) - min(legs) <= 1e-8


@pytest.mark.parametrize("sig", [(3, 4, 5), (3, 3, 4), (5, 5, 5)])
def test_billiard_reflection_and_closure(sig):
    b = billiard3(triangle_group(*sig))
    assert b.residuals["reflectionLaw"] <= 1e-9
    assert b.closure_error <= 1e-9
    assert b.length == pytest.approx(2 * b.perimeter, abs=1e-9)


def test_billiard_rejects_right_angle():
    with pytest.raises(NotAcute):
        billiard3(triangle_group(2, 4, 5))


@pytest.mark.parametrize("sig", [(3, 4, 5), (4, 4, 4), (3, 3, 7)])
def test_billiard_is_strict_local_minimum(sig):
    tri = triangle_group(*sig).triangle
    b = billiard3(tri)
    bil = _Billiard(tri)
    base = bil.perimeter(b.bounce_params)
    rng = np.random.default_rng(7)
    for _ in range(100):
        delta = rng.uniform(-1e-4, 1e-4, 3)
        assert bil.perimeter(b.bounce_params + delta) > base


def test_three_point_regions():
    _, curves, regions = curves_for(triangle_group(3, 4, 5))
    assert regions.census == 5
    assert sorted(regions.labels) == ["P", "Q", "R", "orthic1", "orthic2"]
    assert {k: set(v) for k, v in regions.incidences.items()} == PQR_INCIDENCE
    assert regions.adjacency == PQR_ADJACENCY


@pytest.mark.parametrize("sig", [(2, 3, 7), (2, 5, 6)])
def test_two_point_regions(sig):
    _, _, regions = curves_for(triangle_group(*sig))
    assert sorted(regions.labels) == ["Q", "R"]
    assert regions.adjacency == {("Q", "R")}


@pytest.mark.parametrize("sig", [(2, 2, 3, 3), (3, 3, 3, 3), (2, 3, 4, 5), (2, 3, 2, 3)])
def test_b_curves(sig):
    fc = b_curves(quad_group(*sig))
    assert len(fc.points) == 4
    assert fc.regions.census == 6
    assert fc.same_cyclic_order
    assert fc.incidence_ok
    assert {k: set(v) for k, v in fc.regions.incidences.items()} == PQRS_INCIDENCE
    assert fc.regions.adjacency == PQRS_ADJACENCY
    assert max(fc.b1.closure_error, fc.b2.closure_error) <= 1e-9
    # the representative keeps the same return-map class: a cyclic relabeling
    rep = tuple(fc.group.signature)
    assert any(rep == sig[k:] + sig[:k] for k in range(4))


def test_b_curve_points_lie_on_both_curves():
    fc = b_curves(quad_group(3, 3, 3, 3))
    for x in fc.points.values():
        for curve in (fc.b1, fc.b2):
            gaps = []
            for ch in curve.chords:
                d, e = ch.end - ch.start, x - ch.start
                t = np.clip(d @ e / (d @ d), 0, 1)
                gaps.append(np.hypot(*(ch.start + t * d - x)))
            assert min(gaps) <= 1e-8


def test_chords_close_up():
    g = triangle_group(3, 4, 5)
    b = billiard3(g)
    dom = g.domain
    # each chord ends on the side paired with the next chord's entry side
    for a, c in zip(b.chords, b.chords[1:] + b.chords[:1]):
        assert dom.partner[a.exit_side] == c.entry_side
    assert math.isfinite(b.length)
