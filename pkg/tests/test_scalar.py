from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from semiact.scalar import RADICAND_LIMIT, Scalar, normalize, squarefree_decompose

fractions = st.fractions(min_value=-20, max_value=20, max_denominator=12)
radicands = st.sampled_from([1, 2, 3, 5, 6, 7, 10, 12, 18])


@st.composite
def scalars(draw):
    terms = draw(st.lists(st.tuples(fractions, radicands), max_size=3))
    out = Scalar(0)
    for q, r in terms:
        out = out + Scalar(q) * Scalar.sqrt(r)
    return out


def test_normalize_examples():
    assert normalize(1, 8) == Scalar(2) * Scalar.sqrt(2)
    assert normalize(3, 1) == Scalar(3)
    assert normalize(1, Fraction(1, 2)) == Scalar(Fraction(1, 2)) * Scalar.sqrt(2)


def test_add_examples():
    r2, r3 = Scalar.sqrt(2), Scalar.sqrt(3)
    assert r2 + r2 == Scalar(2) * r2
    assert len((r2 + r3)._terms) == 2
    assert r2 + Scalar(-1) * r2 == Scalar(0)


def test_mul_examples():
    r2 = Scalar.sqrt(2)
    assert r2 * r2 == Scalar(2)
    assert r2 * Scalar.sqrt(3) == Scalar.sqrt(6)
    assert (Scalar(Fraction(1, 2)) * r2) * (Scalar(3) * r2) == Scalar(3)


def test_eq_examples():
    assert Scalar(2) * Scalar.sqrt(2) == normalize(1, 8)
    assert Scalar(0) == Scalar.ZERO
    assert not Scalar(0)
    assert hash(Scalar(Fraction(1, 3))) == hash(Fraction(1, 3))


def test_squarefree_decompose():
    assert squarefree_decompose(72) == (6, 2)
    assert squarefree_decompose(1) == (1, 1)
    with pytest.raises(ValueError):
        squarefree_decompose(RADICAND_LIMIT + 1)


def test_str_and_parse():
    x = Scalar(Fraction(1, 2)) + Scalar(3) * Scalar.sqrt(2) - Scalar.sqrt(5)
    assert str(x) == "1/2 + 3*sqrt(2) - 1*sqrt(5)"
    assert Scalar.parse(str(x)) == x


def test_sign_close_values():
    # 99/70 exceeds sqrt(2) by about 7e-5
    assert (Scalar.sqrt(2) - Scalar(Fraction(99, 70))).sign() == -1
    assert (Scalar.sqrt(2) - Scalar(Fraction(140, 99))).sign() == 1
    assert (Scalar.sqrt(3) + Scalar.sqrt(5) - Scalar.sqrt(15)).sign() == 1
    assert Scalar.sqrt(2) < Scalar.sqrt(3)


@given(scalars(), scalars(), scalars())
def test_ring_laws(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    assert a - a == Scalar(0)


@given(fractions.filter(lambda q: q >= 0))
def test_sqrt_squares_back(q):
    r = normalize(1, q) if q else Scalar(0)
    assert r * r == Scalar(q)
    assert r.sign() >= 0


@given(scalars(), scalars())
def test_sign_matches_float(a, b):
    d = a - b
    if abs(float(d)) > 1e-6:
        assert (d.sign() > 0) == (float(d) > 0)
    assert Scalar.parse(str(a)) == a
