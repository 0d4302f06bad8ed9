from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from semiact.cocycle import (
    Cocycle,
    StarCommutationError,
    build_iterate_cocycle,
    build_product_cocycle,
    check_admissible_cocycle,
    check_coherence,
    check_cocycle_identity,
    check_cross_invariance,
    check_normalized,
    check_relation_commutation_implication,
    class_intersection,
    fiber_class,
    relation_witness,
    weight_sum,
)
from semiact.dynamics import COUNTEREXAMPLE_DICT, CellularAutomaton, Shift, all_progressive_dictionaries
from semiact.lattice import mini_square_from_pair
from semiact.space import Angle, parse_point, sample_points

P = parse_point


def test_fiber_class_examples(shift, circle, led):
    assert set(fiber_class(shift, 1, P("|0"))) == {P("|0"), P("1|0")}
    assert set(fiber_class(circle, 2, Angle(Fraction(1, 3)))) == {Angle(Fraction(1, 3)), Angle(Fraction(5, 6))}
    assert set(fiber_class(led, (0, 1), P("|0"))) == {P("|0"), P("|1")}


def test_weight_sum_examples(omega_shift, shift):
    assert weight_sum(omega_shift, 1, fiber_class(shift, 1, P("0|1"))) == 1
    assert weight_sum(omega_shift, 1, []) == 0
    assert weight_sum(omega_shift, 1, [P("|0")]) == Fraction(1, 2)


def test_class_intersection_examples(led):
    x = P("01|1")
    assert set(class_intersection(led, (1, 0), (1, 0), x, x)) == set(fiber_class(led, (1, 0), x))
    c = class_intersection(led, (1, 0), (0, 1), x, x)
    assert 1 <= len(c) <= 2 and x in c


def test_iterate_cocycle_examples(omega_shift):
    assert omega_shift(3, P("0|1")) == Fraction(1, 8)
    assert omega_shift(0, P("|0")) == 1
    for d in all_progressive_dictionaries(3)[:4]:
        om = build_iterate_cocycle(CellularAutomaton(d))
        assert om(1, P("01|1")) == Fraction(1, 4)


def test_product_cocycle_examples(omega_led, led):
    x = P("0|01")
    assert omega_led((1, 1), x) == Fraction(1, 4)
    assert omega_led((2, 0), x) == Fraction(1, 4)
    assert weight_sum(omega_led, (1, 1), fiber_class(led, (1, 1), x)) == 1
    assert len(fiber_class(led, (1, 1), x)) == 4


def test_product_requires_star_commuting():
    with pytest.raises(StarCommutationError):
        build_product_cocycle(Shift(), CellularAutomaton(COUNTEREXAMPLE_DICT))


def test_suites_pass_small(omega_shift, omega_led, omega_circle):
    for om in (omega_shift, omega_led):
        for check in (check_normalized, check_cocycle_identity, check_coherence, check_admissible_cocycle):
            r = check(om, 3, 2)
            assert r.passed, (om.name, r.check, r.witnesses)
    for check in (check_normalized, check_cocycle_identity, check_coherence):
        assert check(omega_circle, 20, 6).passed


def test_broken_cocycle_fails_normalization(shift):
    broken = Cocycle(shift, lambda n, x: Fraction(1, 3) ** n.to_int(), name="third")
    r = check_normalized(broken, 2, 1)
    assert not r.passed and r.witnesses[0]["sum"] == Fraction(2, 3)


def test_admissible_mini_square_example(omega_led, led):
    ms = mini_square_from_pair(led.elem((1, 0)), led.elem((0, 1)))
    r = check_admissible_cocycle(omega_led, 3, mini_squares=[ms])
    assert r.passed and r.details["holds"]["ii"] == r.samples
    t_omega = build_iterate_cocycle(led.endos[1])
    assert all(t_omega(1, z) == t_omega(1, led.endos[0].apply(z)) for z in sample_points(3))


def test_circle_mini_square_example(omega_circle, circle):
    ms = mini_square_from_pair(circle.elem(5), circle.elem(3))
    assert (ms.s, ms.t) == (circle.elem(5), circle.elem(3))
    assert check_admissible_cocycle(omega_circle, 20, mini_squares=[ms]).passed


def test_cross_invariance(led):
    assert check_cross_invariance(build_iterate_cocycle(Shift()), led.endos[1], 3, 2).passed


def test_counterexample_coherence_fails(omega_counter):
    r = check_coherence(omega_counter, 3, 1, stop_on_fail=True)
    assert not r.passed
    w = r.witnesses[0]
    assert w["lhs"] != w["rhs"]


def test_relation_implication(omega_counter, counter, led, omega_led):
    w, _ = relation_witness(counter, (1, 0), (0, 1), 3)
    assert w is not None and w[2] != w[3]
    r = check_relation_commutation_implication([omega_counter], counter, 3)
    assert r.passed and not r.details["relations_commute"]
    assert not r.details["cocycles"][0]["coherent"]
    r = check_relation_commutation_implication([omega_led], led, 3)
    assert r.passed and r.details["relations_commute"]


_LED = None


def _led_omega():
    global _LED
    if _LED is None:
        from semiact.dynamics import ledrappier_system
        led = ledrappier_system()
        _LED = build_product_cocycle(*led.endos, action=led, check=False)
    return _LED


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 4), st.integers(0, 4), st.integers(0, 4), st.integers(0, 4),
       st.sampled_from(sample_points(3)))
def test_product_cocycle_identity(a, b, c, d, x):
    om = _led_omega()
    led = om.action
    n, m = led.elem((a, b)), led.elem((c, d))
    assert om(n * m, x) == om(n, x) * om(m, led.apply(n, x))
