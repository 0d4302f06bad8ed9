"""Exact real numbers of the form ``q1*sqrt(r1) + ... + qk*sqrt(rk)``.

The radicands are distinct square-free positive integers and the
coefficients are rationals.  Square roots of distinct square-free integers
are linearly independent over the rationals, so the canonical term map is a
unique representation and equality is decided by comparing term maps.
"""

from __future__ import annotations

import re
from fractions import Fraction
from math import gcd, isqrt
from numbers import Rational

__all__ = ["Scalar", "normalize", "squarefree_decompose", "RADICAND_LIMIT"]

RADICAND_LIMIT = 10**12


def squarefree_decompose(n: int) -> tuple[int, int]:
    """Return ``(k, f)`` with ``n == k*k*f`` and ``f`` square-free."""
    if n <= 0:
        raise ValueError(f"radicand must be positive, got {n}")
    if n > RADICAND_LIMIT:
        raise ValueError(f"radicand {n} exceeds limit {RADICAND_LIMIT}")
    k, f = 1, 1
    p = 2
    while p * p <= n:
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        k *= p ** (e // 2)
        if e % 2:
            f *= p
        p += 1 if p == 2 else 2
    return k, f * n


def _fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"expected a rational, got {type(x).__name__}")


def normalize(q, r) -> "Scalar":
    """Canonical form of ``q * sqrt(r)`` for rationals ``q`` and ``r > 0``."""
    q = _fraction(q)
    r = _fraction(r)
    if r <= 0:
        raise ValueError(f"radicand must be positive, got {r}")
    if q == 0:
        return Scalar.ZERO
    # sqrt(a/b) = sqrt(a*b)/b
    a, b = r.numerator, r.denominator
    k, f = squarefree_decompose(a * b)
    return Scalar._make({f: q * k / b})


class Scalar:
    """Immutable element of the ring generated by square roots of rationals."""

    __slots__ = ("_terms", "_hash")

    ZERO: "Scalar"
    ONE: "Scalar"

    def __new__(cls, value=0):
        if isinstance(value, Scalar):
            return value
        q = _fraction(value)
        return cls._make({1: q} if q else {})

    @classmethod
    def _make(cls, terms: dict) -> "Scalar":
        self = object.__new__(cls)
        self._terms = tuple(sorted((r, q) for r, q in terms.items() if q))
        self._hash = None
        return self

    @classmethod
    def from_terms(cls, terms) -> "Scalar":
        """Build from any iterable of ``(radicand, coefficient)`` pairs."""
        total = cls.ZERO
        items = terms.items() if isinstance(terms, dict) else terms
        for r, q in items:
            total = total + normalize(q, r)
        return total

    @classmethod
    def sqrt(cls, r) -> "Scalar":
        return normalize(1, r)

    @property
    def terms(self) -> dict[int, Fraction]:
        return dict(self._terms)

    def is_rational(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and self._terms[0][0] == 1)

    def to_fraction(self) -> Fraction:
        if not self._terms:
            return Fraction(0)
        if not self.is_rational():
            raise ValueError(f"{self} is irrational")
        return self._terms[0][1]

    # arithmetic

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        if not other._terms:
            return self
        if not self._terms:
            return other
        acc = dict(self._terms)
        for r, q in other._terms:
            acc[r] = acc.get(r, 0) + q
        return Scalar._make(acc)

    __radd__ = __add__

    def __neg__(self):
        return Scalar._make({r: -q for r, q in self._terms})

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        if not self._terms or not other._terms:
            return Scalar.ZERO
        acc: dict[int, Fraction] = {}
        for r1, q1 in self._terms:
            for r2, q2 in other._terms:
                # r1, r2 square-free: sqrt(r1*r2) = g*sqrt((r1/g)*(r2/g))
                g = gcd(r1, r2)
                r = (r1 // g) * (r2 // g)
                acc[r] = acc.get(r, 0) + q1 * q2 * g
        return Scalar._make(acc)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        if not other.is_rational():
            raise ValueError("division only by rationals or single radicals")
        return self * Scalar(1 / other.to_fraction())

    # comparison

    def __eq__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            if self.is_rational():
                self._hash = hash(self.to_fraction())
            else:
                self._hash = hash(self._terms)
        return self._hash

    def __bool__(self):
        return bool(self._terms)

    def sign(self) -> int:
        """Exact sign, by interval refinement of each square root."""
        if not self._terms:
            return 0
        if len(self._terms) == 1:
            return 1 if self._terms[0][1] > 0 else -1
        bits = 8
        while True:
            scale = 1 << bits
            lo = hi = Fraction(0)
            for r, q in self._terms:
                s = isqrt(r * scale * scale)
                a = Fraction(s, scale)
                b = a if s * s == r * scale * scale else Fraction(s + 1, scale)
                if q > 0:
                    lo += q * a
                    hi += q * b
                else:
                    lo += q * b
                    hi += q * a
            if lo > 0:
                return 1
            if hi < 0:
                return -1
            bits *= 2

    def __lt__(self, other):
        return (self - _coerce(other)).sign() < 0

    def __le__(self, other):
        return (self - _coerce(other)).sign() <= 0

    def __gt__(self, other):
        return (self - _coerce(other)).sign() > 0

    def __ge__(self, other):
        return (self - _coerce(other)).sign() >= 0

    def __float__(self):
        return float(sum(float(q) * r**0.5 for r, q in self._terms))

    # text

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for i, (r, q) in enumerate(self._terms):
            neg = q < 0
            body = _fmt(abs(q)) if r == 1 else f"{_fmt(abs(q))}*sqrt({r})"
            if i == 0:
                parts.append(("-" if neg else "") + body)
            else:
                parts.append((" - " if neg else " + ") + body)
        return "".join(parts)

    def __repr__(self):
        return f"Scalar('{self}')"

    @classmethod
    def parse(cls, text: str) -> "Scalar":
        """Inverse of ``str``: ``"1/2 + 3*sqrt(2) - sqrt(5)"``."""
        s = text.replace(" ", "")
        if not s:
            raise ValueError("empty scalar literal")
        if s[0] not in "+-":
            s = "+" + s
        total = cls.ZERO
        pos = 0
        while pos < len(s):
            m = _TERM.match(s, pos)
            if not m:
                raise ValueError(f"malformed scalar literal: {text!r}")
            sign, coef, rad = m.group("sign"), m.group("coef"), m.group("rad")
            q = Fraction(coef) if coef else Fraction(1)
            if coef is None and rad is None:
                raise ValueError(f"malformed scalar literal: {text!r}")
            if sign == "-":
                q = -q
            total = total + normalize(q, int(rad) if rad else 1)
            pos = m.end()
        return total


_TERM = re.compile(r"(?P<sign>[+-])(?P<coef>\d+(?:/\d+)?)?(?:\*?sqrt\((?P<rad>\d+)\))?")


def _fmt(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _coerce(x):
    if isinstance(x, Scalar):
        return x
    if isinstance(x, (int, Rational)):
        return Scalar(x)
    return NotImplemented


Scalar.ZERO = Scalar._make({})
Scalar.ONE = Scalar._make({1: Fraction(1)})
