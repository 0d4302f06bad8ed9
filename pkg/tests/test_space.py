from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from semiact.scalar import Scalar
from semiact.space import (
    Angle,
    CylinderFunction,
    CylinderSet,
    DepthCapError,
    Word,
    canonicalize,
    parse_point,
    sample_angles,
    sample_points,
    sequences_equal,
)

bits = st.text(alphabet="01", max_size=6)
words = st.builds(Word, bits, st.text(alphabet="01", min_size=1, max_size=5))


def test_coordinate_examples():
    assert Word("0", "1").coordinate(0) == 0
    assert Word("0", "1").coordinate(5) == 1
    assert Word("", "01").coordinate(3) == 1


def test_canonicalize_examples():
    assert canonicalize("01", "11") == Word("0", "1")
    w = canonicalize("", "0101")
    assert (w.prefix, w.cycle) == ("", "01")
    w = canonicalize("1", "1")
    assert (w.prefix, w.cycle) == ("", "1")


def test_parse_point():
    assert parse_point("0|1") == Word("0", "1")
    assert str(parse_point("01|0101")) == "|01"
    assert str(parse_point("011|0")) == "011|0"
    assert parse_point("2/4") == Angle(Fraction(1, 2))
    with pytest.raises(ValueError):
        parse_point("abc")


def test_sample_counts():
    assert len(sample_points(3)) == 80
    assert len(sample_points(4)) == 352
    assert len(set(sample_points(4))) == 352
    assert [a.value for a in sample_angles(4)] == [0, Fraction(1, 2), Fraction(1, 3), Fraction(2, 3)]


def test_cylinder_function_examples():
    f = CylinderFunction(1, (0, 1))
    assert f(Word("0", "1")) == Scalar(0)
    assert CylinderFunction.constant(Fraction(2, 3))(Word("", "01")) == Scalar(Fraction(2, 3))
    assert CylinderFunction.indicator("11")(Word("", "1")) == Scalar(1)
    one = CylinderFunction.indicator("0") + CylinderFunction.indicator("1")
    assert one == CylinderFunction.constant(1)
    assert f * CylinderFunction.constant(1) == f
    assert CylinderSet("01").contains(Word("01", "1"))


def test_depth_cap():
    with pytest.raises(DepthCapError):
        CylinderFunction.indicator("0" * 13)


@given(words)
def test_canonical_form_is_unique(w):
    # the same sequence written with a doubled cycle and an unrolled prefix
    other = Word(w.prefix + w.cycle, w.cycle * 2)
    assert other == w
    assert hash(other) == hash(w)
    assert sequences_equal(other, w)
    assert all(other.coordinate(i) == w.coordinate(i) for i in range(20))


@given(words, st.integers(0, 8))
def test_tail_and_prepend(w, k):
    assert w.tail(k).coordinate(0) == w.coordinate(k)
    assert w.tail(k).prepend(w.first(k)) == w


@given(st.lists(st.sampled_from([0, 1, Fraction(1, 2), -3]), min_size=8, max_size=8), words)
def test_refine_agrees(table, w):
    f = CylinderFunction(3, tuple(table))
    assert f.refine(5)(w) == f(w)
    assert f.reduce() == f
    assert f.reduce()(w) == f(w)
