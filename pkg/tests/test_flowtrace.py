import math
from itertools import product

import numpy as np
import pytest

from toric_sections.flowtrace import (
    SECTION_ORDERS,
    SECTIONS,
    BoundaryOrbit,
    CodeWord,
    UnitTangent,
    code_crossings,
    pass_sections,
    random_traces,
    trace_axis,
    trace_ray,
    trace_setup,
    verify_hit_cycle,
)
from toric_sections.hyperbolic import HPoint, uhp_from_klein

PARTS = {"pqr": "PQR", "pqrs": "PQRS"}


def test_code_crossings_examples():
    assert code_crossings(CodeWord(("Q", "R", "P"), cyclic=True), "pqr", "A") == 2
    assert code_crossings(CodeWord(("P", "P")), "pqr", "A") == 1
    assert code_crossings(CodeWord(("Q", "P"), cyclic=True), "pqrs", "A") == 1


def test_factors_counted_for_a():
    got = {x + y for x, y in product("PQR", repeat=2)
           if code_crossings(CodeWord((x, y)), "pqr", "A")}
    assert got == {"RP", "RQ", "PQ", "PP", "QQ", "RR"}


@pytest.mark.parametrize("family", ["pqr", "pqrs"])
def test_pass_model_matches_order_rule(family):
    parts = PARTS[family]
    for x, y in product(parts, repeat=2):
        passed = pass_sections(family, x, y)
        for s in SECTIONS[family]:
            assert (s in passed) == (code_crossings(CodeWord((x, y)), family, s) == 1), (x, y, s)


def test_section_orders_are_permutations():
    for family, orders in SECTION_ORDERS.items():
        for order in orders.values():
            assert sorted(order) == sorted(PARTS[family])


def test_two_point_pass_model():
    assert pass_sections("2qr", "Q", "R") == ["R"]
    assert pass_sections("2qr", "Q", "Q") == []


@pytest.mark.parametrize("sig", [(2, 3, 7), (3, 4, 5), (2, 2, 3, 3)])
def test_random_batch(sig):
    rep = random_traces(sig, n=12, seed=5, min_crossings=40)
    assert len(rep.traces) == 12
    assert rep.pass_rate() == 1.0
    assert rep.counts_agree()
    for t in rep.traces:
        assert t.deck_residual <= 1e-8
        times = [c.time for c in t.crossings]
        assert all(a < b for a, b in zip(times, times[1:]))


def test_batches_are_deterministic():
    a = random_traces((3, 4, 5), n=4, seed=11, min_crossings=20)
    b = random_traces((3, 4, 5), n=4, seed=11, min_crossings=20)
    assert [t.labels for t in a.traces] == [t.labels for t in b.traces]
    assert [t.code for t in a.traces] == [t.code for t in b.traces]


def test_reversed_geodesic_runs_backwards():
    rep = random_traces((3, 4, 5), n=5, seed=2, min_crossings=30, reverse=True)
    assert rep.reversed_pass_rate() == 1.0
    assert rep.counts_agree()
    assert verify_hit_cycle(["A", "B", "C", "A"], "pqr", reverse=True).passed
    assert not verify_hit_cycle(["A", "C", "B", "A"], "pqr", reverse=True).passed


def test_shuffled_labels_fail():
    rep = random_traces((2, 2, 3, 3), n=1, seed=3, min_crossings=20)
    labels = rep.traces[0].labels
    assert verify_hit_cycle(labels, "pqrs").passed
    shuffled = labels[:]
    np.random.default_rng(0).shuffle(shuffled)
    assert not verify_hit_cycle(shuffled, "pqrs").passed


def test_h_lift_is_rejected():
    R = trace_setup((2, 3, 7)).group.rotations
    y, z = R["y"], R["z"]
    g = z @ y @ z ** 5 @ y ** 2
    assert abs(g.trace) == pytest.approx(2.247, abs=1e-3)
    with pytest.raises(BoundaryOrbit):
        trace_axis(g, (2, 3, 7))


def _closed_cases():
    R = trace_setup((2, 3, 7)).group.rotations
    y, z = R["y"], R["z"]
    yield (2, 3, 7), z ** 2 @ y ** 2 @ z ** 2 @ y ** 2 @ z ** 3 @ y ** 2
    _, y, z = trace_setup((3, 4, 5)).group.rotations.values()
    yield (3, 4, 5), y @ z @ y @ z ** 3
    rots = list(trace_setup((2, 2, 3, 3)).group.rotations.values())
    a, b = rots[1], rots[2]
    yield (2, 2, 3, 3), a @ b @ a @ b ** 2


@pytest.mark.parametrize("sig,g", list(_closed_cases()), ids=lambda v: str(v) if isinstance(v, tuple) else "")
def test_closed_geodesic_counts(sig, g):
    t = trace_axis(g, sig)
    assert t.code.cyclic
    assert t.counts_agree()
    assert t.crossings
    t2 = trace_axis(g @ g, sig)
    assert t2.section_counts() == {s: 2 * n for s, n in t.section_counts().items()}
    assert t2.counts_agree()


def test_closed_geodesic_examples():
    cases = dict(_closed_cases())
    t = trace_axis(cases[(3, 4, 5)], (3, 4, 5))
    assert t.labels == ["C", "B", "A"]
    assert str(t.code) == "QR(cyclic)"
    t = trace_axis(cases[(2, 3, 7)], (2, 3, 7))
    assert str(t.code) == "QRQRQR(cyclic)"


@pytest.mark.parametrize("sig", [(2, 3, 7), (3, 4, 5), (2, 2, 3, 3)])
def test_bounded_gaps(sig):
    setup = trace_setup(sig)
    diam = setup.domain.diameter()
    start = UnitTangent(uhp_from_klein(setup.domain.centroid()), 0.3)
    t = trace_ray(start, 50 * diam, sig)
    for s, gap in t.max_gaps().items():
        assert gap < 10 * diam, s


def test_unit_tangent_reverse():
    u = UnitTangent(HPoint(0.0, 1.0), 0.4)
    assert u.reversed().reversed().direction == pytest.approx(0.4 + 2 * math.pi)
