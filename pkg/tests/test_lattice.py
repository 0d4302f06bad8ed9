from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from semiact.lattice import (
    LatticeError,
    complete_mini_square,
    decompose,
    int_vector,
    mini_square_from_pair,
    parse_element,
    positive_rationals,
)

Z1, Z2, Q = int_vector(1), int_vector(2), positive_rationals()

z2 = st.tuples(st.integers(-6, 6), st.integers(-6, 6)).map(Z2)
z2p = st.tuples(st.integers(0, 6), st.integers(0, 6)).map(Z2)
qpos = st.fractions(min_value=Fraction(1, 40), max_value=40, max_denominator=40).filter(lambda q: q > 0).map(Q)
qp = st.integers(1, 60).map(Q)


def test_meet_join_examples():
    assert (Z2((2, 0)) & Z2((0, 3))) == Z2((0, 0))
    assert (Q(4) & Q(6)) == Q(2)
    assert (Q(4) | Q(6)) == Q(12)
    assert (Z1(-3) | Z1(0)) == Z1(0)


def test_mini_square_from_pair_examples():
    ms = mini_square_from_pair(Z2((2, 0)), Z2((0, 3)))
    assert (ms.s, ms.t, ms.u, ms.v) == (Z2((2, 0)), Z2((0, 3)), Z2((0, 3)), Z2((2, 0)))
    ms = mini_square_from_pair(Q(4), Q(6))
    assert (ms.s, ms.t, ms.u, ms.v) == (Q(2), Q(3), Q(3), Q(2))
    ms = mini_square_from_pair(Q(5), Q(5))
    assert all(x.is_identity() for x in (ms.s, ms.t, ms.u, ms.v))


def test_complete_mini_square_examples():
    assert complete_mini_square(Q(3), Q(5)) == (Q(5), Q(3))
    assert complete_mini_square(Z2((1, 0)), Z2((0, 1))) == (Z2((0, 1)), Z2((1, 0)))
    n = Z2((2, 1))
    assert complete_mini_square(Z2.identity, n) == (n, Z2.identity)
    with pytest.raises(LatticeError):
        complete_mini_square(Q(4), Q(6))


def test_decompose_examples():
    (y, n), (p, m) = decompose(Z2((2, -1)))
    assert (p, m) == (Z2((2, 0)), Z2((0, 1)))
    assert (y, n) == (Z2((0, -1)), Z2((2, 0)))
    (y, n), (p, m) = decompose(Z1(-3))
    assert n == Z1(0) and y == Z1(-3) and (p, m) == (Z1(0), Z1(3))
    assert decompose(Q(1)) == ((Q(1), Q(1)), (Q(1), Q(1)))


def test_parse_and_str():
    assert parse_element(Z2, "(1,-1)") == Z2((1, -1))
    assert parse_element(Q, "2/3") == Q(Fraction(2, 3))
    assert str(Z2((1, -1))) == "(1,-1)"
    assert parse_element(Q, str(Q(Fraction(12, 35)))) == Q(Fraction(12, 35))


@given(st.one_of(st.tuples(z2p, z2p), st.tuples(qp, qp)))
def test_mini_square_invariants(pair):
    m, n = pair
    ms = mini_square_from_pair(m, n)
    assert ms.is_valid(), ms.violations()
    assert (ms.s | ms.t) == ms.s * ms.u == ms.t * ms.v
    assert complete_mini_square(ms.s, ms.t) == (ms.u, ms.v)


@given(st.one_of(z2, qpos))
def test_decompose_recomposes(x):
    (y, n), (p, m) = decompose(x)
    one = x.group.identity
    assert y * n == x and p * m.inv() == x
    assert n.in_p() and m.in_p() and y <= one <= p


@given(st.one_of(st.tuples(z2, z2, z2), st.tuples(qpos, qpos, qpos)))
def test_lattice_group_laws(t):
    a, b, c = t
    assert (a & b) * c == (a * c) & (b * c)
    assert (a | b) == ((a.inv() & b.inv())).inv()
    assert (a & b) <= a <= (a | b)
    assert a * a.inv() == a.group.identity
