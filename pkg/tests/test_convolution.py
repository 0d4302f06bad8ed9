from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from semiact import convolution as C
from semiact.operators import PreconditionError
from semiact.scalar import Scalar
from semiact.space import CylinderFunction, parse_point, sample_points
from semiact.suites import perturbed_cocycle

P = parse_point
ind = CylinderFunction.indicator


def test_sqrt_fraction():
    assert C.sqrt_fraction(Fraction(1, 4)) == Scalar(Fraction(1, 2))
    assert C.sqrt_fraction(Fraction(1, 2)) * C.sqrt_fraction(Fraction(1, 2)) == Scalar(Fraction(1, 2))
    assert C.sqrt_fraction(0) == Scalar(0)


def test_monomial_examples(omega_shift, shift):
    s1 = C.S(shift, 1)
    x = P("0|1")
    assert C.value(s1, omega_shift, x, 1, shift.apply(1, x)) == C.sqrt_fraction(Fraction(1, 2))
    assert C.value(s1, omega_shift, x, 1, P("|0")) == Scalar(0)
    f = ind("0")
    assert C.value(C.pi(shift, f), omega_shift, x, 0, x) == Scalar(1)
    assert C.value(C.pi(shift, f), omega_shift, x, 0, P("|1")) == Scalar(0)


def test_adjoint_examples(omega_shift, shift):
    s1 = C.S(shift, 1)
    y = P("01|1")
    ty = shift.apply(1, y)
    half = C.sqrt_fraction(Fraction(1, 2))
    assert C.adjoint_eval(s1, omega_shift, ty, -1, y) == half
    assert C.value(C.S_star(shift, 1), omega_shift, ty, -1, y) == half
    p = C.pi(shift, ind("1"))
    assert C.adjoint(p) == C.Monomial(None, p.n, p.m, p.u)
    assert C.adjoint(C.adjoint(p)) == p
    for x in sample_points(2):
        assert C.row(C.adjoint(p), omega_shift, x) == C.row(p, omega_shift, x)


def test_convolve_examples(omega_led, led):
    n = led.elem((1, 1))
    iso = C.Conv(C.S_star(led, n), C.S(led, n))
    x = P("0|01")
    assert C.convolve_eval(C.S_star(led, n), C.S(led, n), omega_led, x, (0, 0), x) == Scalar(1)
    assert C.value(iso, omega_led, x, (0, 0), P("|1")) == Scalar(0)
    assert C.value(iso, omega_led, x, (1, 0), x) == Scalar(0)
    proj = C.Conv(C.S(led, n), C.S_star(led, n))
    for y in led.fiber_class(n, x):
        assert C.value(proj, omega_led, x, (0, 0), y) == Scalar(Fraction(1, 4))


def test_sigma_examples(omega_led, led):
    g = led.elem((1, -1))
    sg = C.sigma(led, g)
    assert sg == C.Conv(C.S_star(led, (0, 1)), C.S(led, (1, 0)))
    law = C.Conv(C.Conv(sg, C.sigma(led, g.inv())), sg)
    for x in sample_points(2):
        assert C.row(law, omega_led, x) == C.row(sg, omega_led, x)
    with pytest.raises(ValueError):
        C.sigma(led, g, (led.elem((1, 0)), led.elem((1, 0))))


def test_checks_on_shift(omega_shift):
    for check in (C.check_isometry, C.check_semigroup, C.check_SS_star_formula,
                  C.check_projection_commutation, C.check_partial_representation, C.check_covariance):
        r = check(omega_shift, 3, 2)
        assert r.passed, (r.check, r.witnesses)
    assert C.check_adjoint_laws(omega_shift, 2, 1).passed


def test_covariance_cases_shift(omega_shift):
    r = C.check_covariance(omega_shift, 2, 1)
    assert r.passed and r.details["cases"]["1"] and r.details["cases"]["2"]


def test_projection_commutation_circle(omega_circle):
    r = C.check_projection_commutation(omega_circle, 10, 3)
    assert r.passed and r.details["lemma_instances"]["i"] > 0


def test_lemma_identities_example(omega_led, led):
    x, z = P("|0"), P("|1")
    i1, i2, s1, s2 = C.lemma_identities(omega_led, led.elem((1, 0)), led.elem((0, 1)), x, z)
    assert i1 == i2 and s1 == s2


def test_negative_control(omega_led):
    bad = perturbed_cocycle(omega_led, "1", Fraction(3, 2))
    r = C.check_projection_commutation(bad, 2, 1, check_preconditions=False)
    assert not r.passed
    kinds = {w["identity"] for w in r.witnesses}
    assert {"exchange (i)", "exchange (ii)"} <= kinds
    with pytest.raises(PreconditionError):
        C.check_projection_commutation(bad, 2, 1)


def test_partition_of_unity(omega_shift, omega_led):
    r = C.partition_of_unity(omega_shift, 1, 3)
    assert r.passed and r.details["cells"] == 2
    r = C.partition_of_unity(omega_led, (1, 1), 2)
    assert r.passed and r.details["cell_depth"] == 2
    assert C.partition_of_unity(omega_led, (1, 1), 2, cells=3).passed
    with pytest.raises(PreconditionError):
        C.partition_of_unity(omega_led, (1, 1), 3, cells=1)
    # each u_i on the shift is sqrt(2) on its cell
    u = ind("0").scale(C.sqrt_fraction(2))
    assert u(P("|0")) * u(P("|0")) == Scalar(2)


def test_partition_support(omega_shift, shift):
    # off the unit space the sum vanishes
    pn = C.Conv(C.S(shift, 1), C.S_star(shift, 1))
    total = None
    for w in ("0", "1"):
        u = ind(w).scale(C.sqrt_fraction(2))
        t = C.Conv(C.Conv(C.pi(shift, u), pn), C.pi(shift, u))
        total = t if total is None else C.Plus(total, t)
    for x in sample_points(2):
        assert C.row(total, omega_shift, x) == {(shift.elem(0), x): Scalar(1)}


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(sample_points(2)), st.integers(0, 2), st.integers(0, 2), st.integers(0, 2))
def test_rows_match_pointwise(x, a, b, c):
    om = _om()
    sh = om.action
    e = C.Conv(C.Conv(C.S(sh, a), C.S_star(sh, b)), C.Monomial(ind("1"), sh.elem(c), sh.elem(0), None))
    r = C.row(e, om, x)
    for (g, y), v in r.items():
        assert C.value(e, om, x, g, y) == v
    for y in sample_points(2):
        for g in range(-3, 4):
            assert C.value(e, om, x, g, y) == r.get((sh.elem(g), y), Scalar(0))


_OM: list = []


def _om():
    if not _OM:
        from semiact.cocycle import build_iterate_cocycle
        from semiact.dynamics import Shift, shift_system
        _OM.append(build_iterate_cocycle(Shift(), shift_system()))
    return _OM[0]
