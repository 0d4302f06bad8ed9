from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from semiact.operators import (
    Alpha,
    Base,
    Expectation,
    Interaction,
    Polynomial,
    Transfer,
    canonical_factorization,
    check_E_commutation,
    check_interaction_axioms,
    check_interaction_well_defined,
    check_left_inverse,
    check_poly_W,
    check_transfer_antimult,
    check_transfer_axiom,
    depth_bound,
    eval_expr,
    materialize,
    parse_expr,
    poly_W_apply,
)
from semiact.scalar import Scalar
from semiact.space import Angle, CylinderFunction, parse_point, sample_points

P = parse_point
ind = CylinderFunction.indicator
half = Scalar(Fraction(1, 2))


def test_eval_examples(omega_shift, omega_circle):
    f = Base(ind("1"))
    assert all(eval_expr(Transfer(1, f), omega_shift, y) == half for y in sample_points(2))
    assert eval_expr(Alpha(2, Base(CylinderFunction.constant(1))), omega_shift, P("0|1")) == Scalar(1)
    g = omega_circle.action.elem(Fraction(3, 2))
    assert eval_expr(Interaction(g, Base(Polynomial((0, 1)))), omega_circle, Angle(0)) == Scalar(Fraction(1, 4))


def test_materialize_examples(omega_shift):
    f = Base(ind("1"))
    assert materialize(Transfer(1, f), omega_shift) == CylinderFunction.constant(half)
    assert materialize(Alpha(1, f), omega_shift) == CylinderFunction.from_function(2, lambda w: int(w[1]))
    e = materialize(Expectation(1, f), omega_shift)
    assert e.reduce().depth == 0 and e(P("|0")) == half
    assert depth_bound(Alpha(1, f), omega_shift) == 2


def test_canonical_factorization(led):
    n, m = canonical_factorization(led.elem((1, -1)))
    assert (n, m) == (led.elem((0, 1)), led.elem((1, 0)))


def test_transfer_checks(omega_shift, omega_led, omega_circle):
    for om, depth in ((omega_shift, 3), (omega_led, 2), (omega_circle, 8)):
        assert check_transfer_axiom(om, depth, 1).passed
        assert check_left_inverse(om, depth, 1).passed
    assert check_transfer_antimult(omega_shift, 3, 2).passed
    assert check_transfer_antimult(omega_led, 2, 1).passed


def test_E_commutation(omega_led, omega_counter):
    r = check_E_commutation(omega_led, (1, 0), (0, 1), 3)
    assert r.passed and r.details["operators_commute"] and r.details["formula_holds"]
    assert check_E_commutation(omega_led, (1, 0), (1, 0), 2).details["operators_commute"]
    r = check_E_commutation(omega_counter, (1, 0), (0, 1), 3)
    assert r.passed and not r.details["formula_holds"] and not r.details["operators_commute"]


def test_interaction_examples(omega_shift, omega_led):
    f = Base(ind("01"))
    for x in sample_points(2):
        assert eval_expr(Interaction(0, f), omega_shift, x) == eval_expr(f, omega_shift, x)
        lhs = Interaction(-1, Interaction(1, Interaction(-1, f)))
        assert eval_expr(lhs, omega_shift, x) == eval_expr(Transfer(1, f), omega_shift, x)
    # V_(1,-1) f (y) = sum over T x = y of omega((0,1),x) f(S x)
    S, T = omega_led.action.endos
    for y in sample_points(2):
        direct = sum((omega_led((0, 1), x) * Fraction(str(f.f(S.apply(x)))) for x in T.preimages(y)), Fraction(0))
        assert eval_expr(Interaction((1, -1), f), omega_led, y) == Scalar(direct)


def test_interaction_suites(omega_shift, omega_led, omega_circle):
    assert check_interaction_axioms(omega_shift, 3, 2).passed
    assert check_interaction_well_defined(omega_shift, 3, 2).passed
    assert check_interaction_well_defined(omega_led, 2, 1).passed
    assert check_interaction_axioms(omega_circle, 6, 2).passed


def test_interaction_needs_coherence(omega_counter):
    from semiact.operators import PreconditionError
    with pytest.raises(PreconditionError):
        check_interaction_axioms(omega_counter, 2, 1)


def test_poly_W(omega_led):
    f = Base(ind("1"))
    assert poly_W_apply(0, f, omega_led, P("0|1")) == Scalar(0)
    assert poly_W_apply(1, f, omega_led, P("|0")) == half
    assert check_poly_W(omega_led, 2, 1).passed


def test_parse_expr(led, omega_led, circle, omega_circle):
    assert eval_expr(parse_expr("V[g=(1,-1)] ind(1)", led), omega_led, P("|0")) == half
    assert eval_expr(parse_expr("W[k=1] ind(1)", led), omega_led, P("|0")) == half
    e = parse_expr("L[n=(1,0)] (ind(1) + 2 * const(1/2)) - alpha[n=(0,1)] coord(0)", led)
    x = P("01|1")
    manual = (eval_expr(Transfer((1, 0), Base(ind("1"))), omega_led, x) + Scalar(1)
              - eval_expr(Alpha((0, 1), Base(CylinderFunction.coordinate(0))), omega_led, x))
    assert eval_expr(e, omega_led, x) == manual
    assert eval_expr(parse_expr("V[g=3/2] x", circle), omega_circle, Angle(0)) == Scalar(Fraction(1, 4))
    with pytest.raises(ValueError):
        parse_expr("V ind(1)", led)


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(["0", "1", "01", "10", "11"]), st.sampled_from(["0", "1", "00", "11"]),
       st.integers(0, 2), st.sampled_from(sample_points(3)))
def test_transfer_axiom_property(a, b, n, y):
    om = _shift_omega()
    f, g = Base(ind(a)), Base(ind(b))
    lhs = eval_expr(Transfer(n, f * Alpha(n, g)), om, y)
    assert lhs == eval_expr(Transfer(n, f), om, y) * eval_expr(g, om, y)


_OM = []


def _shift_omega():
    if not _OM:
        from semiact.cocycle import build_iterate_cocycle
        from semiact.dynamics import Shift, shift_system
        _OM.append(build_iterate_cocycle(Shift(), shift_system()))
    return _OM[0]
