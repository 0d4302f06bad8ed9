"""Lattice-ordered groups and mini-squares.

Two concrete families are provided: ``Z^d`` with the product order, and the
multiplicative group of positive rationals ordered by divisibility.  Elements
are immutable and use ``*`` for the group law, ``&`` for the meet and ``|``
for the join.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

__all__ = [
    "LatticeGroup",
    "LatticeElement",
    "MiniSquare",
    "LatticeError",
    "int_vector",
    "positive_rationals",
    "mini_square_from_pair",
    "complete_mini_square",
    "decompose",
    "parse_element",
]


class LatticeError(ValueError):
    pass


def _factor(n: int) -> tuple[tuple[int, int], ...]:
    out = []
    p = 2
    while p * p <= n:
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        if e:
            out.append((p, e))
        p += 1 if p == 2 else 2
    if n > 1:
        out.append((n, 1))
    return tuple(out)


@dataclass(frozen=True)
class LatticeGroup:
    """``kind`` is ``"Z"`` (with dimension ``dim``) or ``"Q+"``."""

    kind: str
    dim: int = 0

    def __post_init__(self):
        if self.kind not in ("Z", "Q+"):
            raise LatticeError(f"unknown lattice group kind {self.kind!r}")
        if self.kind == "Z" and self.dim < 1:
            raise LatticeError("Z^d needs d >= 1")

    def __str__(self):
        return f"Z^{self.dim}" if self.kind == "Z" else "Q+"

    @property
    def identity(self) -> "LatticeElement":
        if self.kind == "Z":
            return LatticeElement(self, (0,) * self.dim)
        return LatticeElement(self, ())

    def __call__(self, value) -> "LatticeElement":
        """Coerce ints, tuples, fractions or exponent maps into the group."""
        if isinstance(value, LatticeElement):
            if value.group != self:
                raise LatticeError(f"element of {value.group} used in {self}")
            return value
        if self.kind == "Z":
            if isinstance(value, int):
                value = (value,)
            value = tuple(int(v) for v in value)
            if len(value) != self.dim:
                raise LatticeError(f"expected {self.dim} entries, got {value}")
            return LatticeElement(self, value)
        if isinstance(value, dict):
            return LatticeElement(self, tuple(sorted((p, e) for p, e in value.items() if e)))
        q = Fraction(value)
        if q <= 0:
            raise LatticeError(f"positive rational expected, got {q}")
        exps = dict(_factor(q.numerator))
        for p, e in _factor(q.denominator):
            exps[p] = exps.get(p, 0) - e
        return LatticeElement(self, tuple(sorted(exps.items())))

    def unit(self, i: int) -> "LatticeElement":
        if self.kind != "Z":
            raise LatticeError("unit vectors only exist in Z^d")
        return self(tuple(1 if j == i else 0 for j in range(self.dim)))

    def box(self, bound: int) -> list["LatticeElement"]:
        """Elements of P in a finite box.

        For ``Z^d``: entries in ``0..bound``.  For ``Q+``: integers ``1..bound``.
        """
        if self.kind == "Z":
            return [self(v) for v in itertools.product(range(bound + 1), repeat=self.dim)]
        return [self(k) for k in range(1, max(bound, 1) + 1)]

    def g_box(self, bound: int) -> list["LatticeElement"]:
        """Group elements ``n^{-1} m`` with ``n, m`` in ``box(bound)``."""
        if self.kind == "Z":
            return [self(v) for v in itertools.product(range(-bound, bound + 1), repeat=self.dim)]
        seen = {n.inv() * m for n in self.box(bound) for m in self.box(bound)}
        return sorted(seen, key=LatticeElement.sort_key)


def int_vector(d: int) -> LatticeGroup:
    return LatticeGroup("Z", d)


def positive_rationals() -> LatticeGroup:
    return LatticeGroup("Q+")


@dataclass(frozen=True, eq=False)
class LatticeElement:
    group: LatticeGroup
    value: tuple

    def __post_init__(self):
        object.__setattr__(self, "_hash", hash((self.group.kind, self.value)))

    def __eq__(self, other):
        if not isinstance(other, LatticeElement):
            return NotImplemented
        return self._hash == other._hash and self.value == other.value and self.group == other.group

    def __hash__(self):
        return self._hash

    def _check(self, other: "LatticeElement") -> None:
        if not isinstance(other, LatticeElement):
            raise TypeError(f"expected LatticeElement, got {type(other).__name__}")
        if other.group != self.group:
            raise LatticeError(f"mixed groups {self.group} and {other.group}")

    def _combine(self, other, op) -> "LatticeElement":
        self._check(other)
        if self.group.kind == "Z":
            return LatticeElement(self.group, tuple(op(a, b) for a, b in zip(self.value, other.value)))
        a, b = dict(self.value), dict(other.value)
        out = {}
        for p in a.keys() | b.keys():
            e = op(a.get(p, 0), b.get(p, 0))
            if e:
                out[p] = e
        return LatticeElement(self.group, tuple(sorted(out.items())))

    def __mul__(self, other):
        return self._combine(other, lambda a, b: a + b)

    def inv(self) -> "LatticeElement":
        return LatticeElement(self.group, tuple((p, -e) for p, e in self.value)
                              if self.group.kind == "Q+" else tuple(-a for a in self.value))

    def __and__(self, other):
        return self._combine(other, min)

    def __or__(self, other):
        return self._combine(other, max)

    def meet(self, other):
        return self & other

    def join(self, other):
        return self | other

    def exponents(self) -> tuple[int, ...]:
        """Coordinates used for the order: the tuple, or the exponent list."""
        if self.group.kind == "Z":
            return self.value
        return tuple(e for _, e in self.value)

    def in_p(self) -> bool:
        return all(e >= 0 for e in self.exponents())

    def is_identity(self) -> bool:
        return all(e == 0 for e in self.exponents())

    def __le__(self, other):
        self._check(other)
        return (self.inv() * other).in_p()

    def __ge__(self, other):
        return other <= self

    def __lt__(self, other):
        return self <= other and self != other

    def __gt__(self, other):
        return other < self

    def __getitem__(self, i):
        return self.value[i]

    def __iter__(self) -> Iterator[int]:
        if self.group.kind != "Z":
            raise LatticeError("only Z^d elements are iterable")
        return iter(self.value)

    def to_fraction(self) -> Fraction:
        if self.group.kind != "Q+":
            raise LatticeError("only Q+ elements convert to fractions")
        q = Fraction(1)
        for p, e in self.value:
            q *= Fraction(p) ** e
        return q

    def to_int(self) -> int:
        if self.group.kind == "Z" and self.group.dim == 1:
            return self.value[0]
        q = self.to_fraction()
        if q.denominator != 1:
            raise LatticeError(f"{self} is not an integer")
        return q.numerator

    def sort_key(self):
        if self.group.kind == "Z":
            return (sum(abs(a) for a in self.value), self.value)
        q = self.to_fraction()
        return (q.numerator * q.denominator, q)

    def __str__(self):
        if self.group.kind == "Z":
            if self.group.dim == 1:
                return str(self.value[0])
            return "(" + ",".join(str(a) for a in self.value) + ")"
        if not self.value:
            return "1"
        q = self.to_fraction()
        if q.denominator == 1 and all(e > 0 for _, e in self.value) and q.numerator < 10**6:
            return str(q.numerator)
        return "*".join(f"{p}^{e}" for p, e in self.value)

    def __repr__(self):
        return f"LatticeElement({self.group}, {self})"


_POW = re.compile(r"^(\d+)\^(-?\d+)$")


def parse_element(group: LatticeGroup, text: str) -> LatticeElement:
    """Parse ``(a,b)``, an integer, ``a/b`` or ``p1^e1*p2^e2``."""
    s = text.strip().replace(" ", "")
    try:
        if group.kind == "Z":
            if s.startswith("(") and s.endswith(")"):
                return group(tuple(int(t) for t in s[1:-1].split(",") if t != ""))
            return group(int(s))
        if "^" in s:
            exps: dict[int, int] = {}
            for part in s.split("*"):
                m = _POW.match(part)
                if m:
                    p, e = int(m.group(1)), int(m.group(2))
                else:
                    p, e = int(part), 1
                if not _factor(p) or len(_factor(p)) != 1 or _factor(p)[0][1] != 1:
                    raise LatticeError(f"{p} is not prime")
                exps[p] = exps.get(p, 0) + e
            return group(exps)
        return group(Fraction(s))
    except (ValueError, ZeroDivisionError) as exc:
        if isinstance(exc, LatticeError):
            raise
        raise LatticeError(f"cannot parse {text!r} as an element of {group}") from exc


@dataclass(frozen=True)
class MiniSquare:
    s: LatticeElement
    t: LatticeElement
    u: LatticeElement
    v: LatticeElement

    def violations(self) -> list[str]:
        one = self.s.group.identity
        out = []
        for name in "stuv":
            if not getattr(self, name).in_p():
                out.append(f"{name} not in P")
        if self.s * self.u != self.t * self.v:
            out.append("su != tv")
        if (self.s & self.t) != one:
            out.append("s meet t != 1")
        if (self.u.inv() | self.v.inv()) != one:
            out.append("u^-1 join v^-1 != 1")
        return out

    def is_valid(self) -> bool:
        return not self.violations()

    def __str__(self):
        return f"(s={self.s}, t={self.t}, u={self.u}, v={self.v})"


def mini_square_from_pair(m: LatticeElement, n: LatticeElement) -> MiniSquare:
    lo, hi = m & n, m | n
    return MiniSquare(lo.inv() * m, lo.inv() * n, m.inv() * hi, n.inv() * hi)


def complete_mini_square(s: LatticeElement, t: LatticeElement) -> tuple[LatticeElement, LatticeElement]:
    if not (s.in_p() and t.in_p()):
        raise LatticeError(f"{s} and {t} must lie in P")
    if not (s & t).is_identity():
        raise LatticeError(f"{s} meet {t} is {s & t}, not 1")
    hi = s | t
    return s.inv() * hi, t.inv() * hi


def decompose(x: LatticeElement):
    """Both canonical factorizations of ``x``.

    Returns ``((y, n), (p, m))`` with ``y = x meet 1`` (so ``y <= 1``),
    ``n = y^{-1} x`` in P and ``x = y n``; and ``p = x join 1``,
    ``m = x^{-1} p`` in P with ``x = p m^{-1}``.
    """
    one = x.group.identity
    y = x & one
    n = y.inv() * x
    p = x | one
    m = x.inv() * p
    return (y, n), (p, m)
