"""Points of the full shift and the circle, cylinder sets and cylinder functions."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Union

from .scalar import Scalar

__all__ = [
    "Word",
    "Angle",
    "Point",
    "CylinderSet",
    "CylinderFunction",
    "DepthCapError",
    "DEFAULT_DEPTH_CAP",
    "canonicalize",
    "parse_point",
    "sample_points",
    "sample_angles",
    "all_words",
    "sequences_equal",
]

DEFAULT_DEPTH_CAP = 12


class DepthCapError(ValueError):
    pass


def _primitive_root(c: str) -> str:
    k = (c + c).find(c, 1)
    return c[:k]


@dataclass(frozen=True, eq=False)
class Word:
    """Eventually periodic binary sequence ``prefix`` followed by ``cycle`` forever.

    The representation is canonical: the cycle is primitive and the prefix is
    as short as possible, so equal sequences have equal ``Word`` objects.
    """

    prefix: str
    cycle: str

    def __post_init__(self):
        prefix, cycle = self.prefix, self.cycle
        if not cycle:
            raise ValueError("cycle must be nonempty")
        if set(prefix + cycle) - {"0", "1"}:
            raise ValueError(f"non-binary symbol in {prefix}|{cycle}")
        cycle = _primitive_root(cycle)
        while prefix and prefix[-1] == cycle[-1]:
            prefix = prefix[:-1]
            cycle = cycle[-1] + cycle[:-1]
        object.__setattr__(self, "prefix", prefix)
        object.__setattr__(self, "cycle", cycle)
        object.__setattr__(self, "_hash", hash((prefix, cycle)))

    def __eq__(self, other):
        if not isinstance(other, Word):
            return NotImplemented
        return self._hash == other._hash and self.prefix == other.prefix and self.cycle == other.cycle

    def __hash__(self):
        return self._hash

    def coordinate(self, i: int) -> int:
        if i < 0:
            raise IndexError(i)
        if i < len(self.prefix):
            return int(self.prefix[i])
        return int(self.cycle[(i - len(self.prefix)) % len(self.cycle)])

    def first(self, k: int) -> str:
        """The first ``k`` coordinates as a string."""
        s = self.prefix[:k]
        need = k - len(s)
        if need > 0:
            c = self.cycle
            s += (c * (need // len(c) + 1))[:need]
        return s

    def tail(self, k: int) -> "Word":
        """The sequence with its first ``k`` coordinates removed."""
        if k <= len(self.prefix):
            return Word(self.prefix[k:], self.cycle)
        r = (k - len(self.prefix)) % len(self.cycle)
        return Word("", self.cycle[r:] + self.cycle[:r])

    def prepend(self, bits: str) -> "Word":
        return Word(bits + self.prefix, self.cycle)

    def sort_key(self):
        return (len(self.prefix), len(self.cycle), self.prefix, self.cycle)

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def __str__(self):
        return f"{self.prefix}|{self.cycle}"

    def __repr__(self):
        return f"Word('{self}')"


@dataclass(frozen=True)
class Angle:
    """Rational point of the circle ``R/Z``, stored in ``[0, 1)``."""

    value: Fraction

    def __post_init__(self):
        v = Fraction(self.value)
        object.__setattr__(self, "value", v - (v.numerator // v.denominator))

    def sort_key(self):
        return (self.value.denominator, self.value)

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def __str__(self):
        return f"{self.value.numerator}/{self.value.denominator}"

    def __repr__(self):
        return f"Angle({self})"


Point = Union[Word, Angle]


def canonicalize(prefix: str, cycle: str) -> Word:
    return Word(prefix, cycle)


def parse_point(text: str) -> Point:
    """``"prefix|cycle"`` for a word, ``"a/b"`` or an integer for an angle."""
    s = text.strip()
    if "|" in s:
        prefix, _, cycle = s.partition("|")
        return Word(prefix, cycle)
    try:
        return Angle(Fraction(s))
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"cannot parse point {text!r}") from exc


def sequences_equal(a: Word, b: Word) -> bool:
    """Compare two words coordinate by coordinate over a window that decides equality."""
    from math import lcm

    n = 2 * (len(a.prefix) + len(b.prefix) + lcm(len(a.cycle), len(b.cycle)))
    return a.first(n) == b.first(n)


def all_words(k: int) -> list[str]:
    return ["".join(w) for w in itertools.product("01", repeat=k)]


_SAMPLE_CACHE: dict[int, tuple[Word, ...]] = {}


def sample_points(depth: int) -> tuple[Word, ...]:
    """All canonical words with prefix and cycle length at most ``depth``."""
    if depth not in _SAMPLE_CACHE:
        pts = set()
        for c in range(1, depth + 1):
            for cyc in all_words(c):
                for p in range(depth + 1):
                    for pre in all_words(p):
                        w = Word(pre, cyc)
                        if len(w.prefix) <= depth and len(w.cycle) <= depth:
                            pts.add(w)
        _SAMPLE_CACHE[depth] = tuple(sorted(pts, key=Word.sort_key))
    return _SAMPLE_CACHE[depth]


def sample_angles(count: int, max_den: int | None = None) -> tuple[Angle, ...]:
    """The first ``count`` rationals in ``[0,1)`` ordered by denominator then value."""
    out: list[Angle] = []
    q = 1
    while len(out) < count and (max_den is None or q <= max_den):
        for p in range(q):
            f = Fraction(p, q)
            if f.denominator == q:
                out.append(Angle(f))
                if len(out) == count:
                    break
        q += 1
    return tuple(out)


@dataclass(frozen=True)
class CylinderSet:
    word: str

    def contains(self, x: Word) -> bool:
        return x.first(len(self.word)) == self.word

    def indicator(self) -> "CylinderFunction":
        return CylinderFunction.indicator(self.word)

    def __str__(self):
        return f"[{self.word}]"


def _check_depth(k: int, cap: int) -> None:
    if k < 0:
        raise ValueError("depth must be nonnegative")
    if k > cap:
        raise DepthCapError(f"depth {k} exceeds cap {cap}")


@dataclass(frozen=True, eq=False)
class CylinderFunction:
    """Function on the full shift depending on the first ``depth`` coordinates.

    ``table[i]`` is the value on the cylinder whose word, read as a binary
    number with the first coordinate most significant, equals ``i``.
    """

    depth: int
    table: tuple
    cap: int = field(default=DEFAULT_DEPTH_CAP, compare=False)

    def __post_init__(self):
        _check_depth(self.depth, self.cap)
        if len(self.table) != 1 << self.depth:
            raise ValueError(f"table has {len(self.table)} entries, expected {1 << self.depth}")
        object.__setattr__(self, "table", tuple(Scalar(v) for v in self.table))

    @classmethod
    def constant(cls, c=1) -> "CylinderFunction":
        return cls(0, (Scalar(c),))

    @classmethod
    def indicator(cls, word: str, cap: int = DEFAULT_DEPTH_CAP) -> "CylinderFunction":
        k = len(word)
        _check_depth(k, cap)
        t = [Scalar.ZERO] * (1 << k)
        t[int(word, 2) if word else 0] = Scalar.ONE
        return cls(k, tuple(t), cap)

    @classmethod
    def from_function(cls, depth: int, fn: Callable[[str], object], cap: int = DEFAULT_DEPTH_CAP):
        _check_depth(depth, cap)
        return cls(depth, tuple(Scalar(fn(w)) for w in all_words(depth)), cap)

    @classmethod
    def coordinate(cls, i: int) -> "CylinderFunction":
        """The function ``x -> x_i``."""
        return cls.from_function(i + 1, lambda w: int(w[i]))

    def refine(self, k: int) -> "CylinderFunction":
        if k < self.depth:
            raise ValueError("cannot refine to a smaller depth")
        _check_depth(k, self.cap)
        t = self.table
        for _ in range(k - self.depth):
            t = tuple(v for v in t for _b in (0, 1))
        return CylinderFunction(k, t, self.cap)

    def reduce(self) -> "CylinderFunction":
        """Smallest-depth table representing the same function."""
        t, k = self.table, self.depth
        while k > 0 and all(t[2 * i] == t[2 * i + 1] for i in range(len(t) // 2)):
            t = t[::2]
            k -= 1
        return CylinderFunction(k, t, self.cap)

    def value_at_word(self, word: str) -> Scalar:
        return self.table[int(word[: self.depth], 2) if self.depth else 0]

    def __call__(self, x: Point) -> Scalar:
        if not isinstance(x, Word):
            raise TypeError("cylinder functions live on the full shift")
        return self.value_at_word(x.first(self.depth))

    def _binary(self, other, op):
        if not isinstance(other, CylinderFunction):
            other = CylinderFunction.constant(other)
        k = max(self.depth, other.depth)
        a, b = self.refine(k).table, other.refine(k).table
        return CylinderFunction(k, tuple(op(x, y) for x, y in zip(a, b)), self.cap)

    def __add__(self, other):
        return self._binary(other, lambda x, y: x + y)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, lambda x, y: x - y)

    def __mul__(self, other):
        return self._binary(other, lambda x, y: x * y)

    __rmul__ = __mul__

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c) -> "CylinderFunction":
        c = Scalar(c)
        return CylinderFunction(self.depth, tuple(c * v for v in self.table), self.cap)

    def __eq__(self, other):
        if not isinstance(other, CylinderFunction):
            return NotImplemented
        a, b = self.reduce(), other.reduce()
        return a.depth == b.depth and a.table == b.table

    def __hash__(self):
        h = self.__dict__.get("_hash")
        if h is None:
            r = self.reduce()
            h = hash((r.depth, r.table))
            object.__setattr__(self, "_hash", h)
        return h

    def __str__(self):
        r = self.reduce()
        if r.depth == 0:
            return str(r.table[0])
        return "{" + ", ".join(f"{w}: {v}" for w, v in zip(all_words(r.depth), r.table)) + "}"

    def __repr__(self):
        return f"CylinderFunction({self})"


def indicators(k: int) -> Iterable[CylinderFunction]:
    return (CylinderFunction.indicator(w) for w in all_words(k))
