"""Surjective local homeomorphisms, semigroup actions and the relations they induce."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .lattice import LatticeElement, LatticeGroup, int_vector, positive_rationals
from .space import Angle, Point, Word, all_words, sample_angles, sample_points

__all__ = [
    "Endo",
    "Shift",
    "CellularAutomaton",
    "CircleMul",
    "Dictionary",
    "DictionaryError",
    "NotProgressiveError",
    "Action",
    "EndoAction",
    "CircleAction",
    "parse_dictionary",
    "load_dictionary",
    "check_progressive",
    "all_progressive_dictionaries",
    "ca_apply",
    "ca_preimages",
    "shift_preimages",
    "check_star_commuting",
    "relation_compose_member",
    "relation_candidates",
    "ledrappier_reconstruct",
    "check_ledrappier_conjugacy",
    "shift_system",
    "ledrappier_system",
    "counterexample_system",
    "circle_system",
    "LEDRAPPIER_DICT",
    "COUNTEREXAMPLE_DICT",
]


class DictionaryError(ValueError):
    pass


class NotProgressiveError(DictionaryError):
    pass


@dataclass(frozen=True)
class Dictionary:
    width: int
    words: frozenset

    def __post_init__(self):
        if self.width < 1:
            raise DictionaryError("dictionary width must be at least 1")
        words = frozenset(self.words)
        for w in words:
            if len(w) != self.width or set(w) - {"0", "1"}:
                raise DictionaryError(f"word {w!r} is not a binary word of length {self.width}")
        object.__setattr__(self, "words", words)

    @classmethod
    def of(cls, *words: str) -> "Dictionary":
        if not words:
            raise DictionaryError("use Dictionary(width, frozenset()) for an empty dictionary")
        return cls(len(words[0]), frozenset(words))

    def __contains__(self, w: str) -> bool:
        return w in self.words

    def sorted_words(self) -> list[str]:
        return sorted(self.words)

    def to_text(self) -> str:
        return "\n".join([f"width={self.width}", *self.sorted_words()]) + "\n"

    def __str__(self):
        return "{" + ",".join(self.sorted_words()) + "}"


def parse_dictionary(text: str) -> Dictionary:
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines or not lines[0].startswith("width="):
        raise DictionaryError("first line must be 'width=p'")
    try:
        p = int(lines[0][len("width="):])
    except ValueError as exc:
        raise DictionaryError(f"bad width line {lines[0]!r}") from exc
    for i, w in enumerate(lines[1:], start=2):
        if len(w) != p or set(w) - {"0", "1"}:
            raise DictionaryError(f"line {i}: {w!r} is not a binary word of length {p}")
    return Dictionary(p, frozenset(lines[1:]))


def load_dictionary(path) -> Dictionary:
    with open(path, encoding="utf-8") as fh:
        return parse_dictionary(fh.read())


def check_progressive(d: Dictionary):
    """Return ``(True, choice)`` or ``(False, beta)``.

    ``choice`` maps each word ``beta`` of length ``p-1`` to the unique bit
    ``e`` with ``beta + e`` in the dictionary; ``beta`` is the first word for
    which that bit is not unique.
    """
    choice = {}
    for beta in all_words(d.width - 1):
        hits = [e for e in "01" if beta + e in d.words]
        if len(hits) != 1:
            return False, beta
        choice[beta] = hits[0]
    return True, choice


def all_progressive_dictionaries(p: int) -> list[Dictionary]:
    betas = all_words(p - 1)
    out = []
    for bits in itertools.product("01", repeat=len(betas)):
        out.append(Dictionary(p, frozenset(b + e for b, e in zip(betas, bits))))
    return out


class Endo:
    """A surjective local homeomorphism with finite, explicitly listed fibers."""

    name = "endo"
    growth = 0
    fiber_size = 1

    def apply(self, x: Point) -> Point:
        raise NotImplementedError

    def preimages(self, y: Point) -> tuple:
        raise NotImplementedError

    def power(self, x: Point, k: int) -> Point:
        for _ in range(k):
            x = self.apply(x)
        return x

    def __str__(self):
        return self.name


class Shift(Endo):
    name = "S"
    growth = 1
    fiber_size = 2

    def __eq__(self, other):
        return isinstance(other, Shift)

    def __hash__(self):
        return hash("Shift")

    def apply(self, x: Word) -> Word:
        return x.tail(1)

    def preimages(self, y: Word) -> tuple:
        return shift_preimages(y)


def shift_preimages(y: Word) -> tuple:
    return (y.prepend("0"), y.prepend("1"))


def ca_apply(d: Dictionary, x: Word) -> Word:
    """Sliding-window image ``T(x)_k = [x_k .. x_{k+p-1} in D]``."""
    p = d.width
    lp, lc = len(x.prefix), len(x.cycle)
    bits = x.first(lp + lc + p - 1)
    out = "".join("1" if bits[k:k + p] in d.words else "0" for k in range(lp + lc))
    return Word(out[:lp], out[lp:])


def ca_preimages(d: Dictionary, y: Word, choice: dict | None = None) -> tuple:
    """All preimages of ``y``, one for each initial window of ``p-1`` bits."""
    if choice is None:
        ok, choice = check_progressive(d)
        if not ok:
            raise NotProgressiveError(f"dictionary {d} is not progressive at {choice!r}")
    p = d.width
    lp, lc = len(y.prefix), len(y.cycle)
    out = []
    for beta in all_words(p - 1):
        x = list(beta)
        seen: dict[tuple[str, int], int] = {}
        k = 0
        while True:
            window = "".join(x[k:k + p - 1])
            if k >= lp:
                state = (window, (k - lp) % lc)
                if state in seen:
                    k1 = seen[state]
                    out.append(Word("".join(x[:k1]), "".join(x[k1:k])))
                    break
                seen[state] = k
            e = choice[window]
            x.append(e if y.coordinate(k) == 1 else ("1" if e == "0" else "0"))
            k += 1
    return tuple(out)


class CellularAutomaton(Endo):
    def __init__(self, dictionary: Dictionary):
        ok, choice = check_progressive(dictionary)
        if not ok:
            raise NotProgressiveError(f"dictionary {dictionary} is not progressive at {choice!r}")
        self.dictionary = dictionary
        self._choice = choice
        self.growth = dictionary.width - 1
        self.fiber_size = 1 << (dictionary.width - 1)
        self.name = f"T{dictionary}"
        self._img: dict = {}
        self._pre: dict = {}

    def __eq__(self, other):
        return isinstance(other, CellularAutomaton) and other.dictionary == self.dictionary

    def __hash__(self):
        return hash(self.dictionary)

    def apply(self, x: Word) -> Word:
        r = self._img.get(x)
        if r is None:
            r = self._img[x] = ca_apply(self.dictionary, x)
        return r

    def preimages(self, y: Word) -> tuple:
        r = self._pre.get(y)
        if r is None:
            r = self._pre[y] = ca_preimages(self.dictionary, y, self._choice)
        return r


class CircleMul(Endo):
    def __init__(self, n: int):
        if n < 1:
            raise ValueError("CircleMul needs n >= 1")
        self.n = n
        self.fiber_size = n
        self.name = f"x{n}"

    def __eq__(self, other):
        return isinstance(other, CircleMul) and other.n == self.n

    def __hash__(self):
        return hash(("CircleMul", self.n))

    def apply(self, x: Angle) -> Angle:
        return Angle(self.n * x.value)

    def preimages(self, y: Angle) -> tuple:
        return tuple(Angle((y.value + j) / self.n) for j in range(self.n))


class Action:
    """A right action of the positive cone P of a lattice-ordered group on X."""

    group: LatticeGroup
    name: str

    def elem(self, n) -> LatticeElement:
        return self.group(n)

    def apply(self, n, x: Point) -> Point:
        raise NotImplementedError

    def preimages(self, n, y: Point) -> tuple:
        raise NotImplementedError

    def samples(self, depth: int) -> tuple:
        raise NotImplementedError

    def growth(self, n) -> int | None:
        """Coordinates of input consumed per output coordinate, or None."""
        return None

    def box(self, bound: int) -> list[LatticeElement]:
        return self.group.box(bound)

    def g_box(self, bound: int) -> list[LatticeElement]:
        return self.group.g_box(bound)

    def fiber_class(self, n, y: Point) -> tuple:
        return self.preimages(n, self.apply(n, y))

    def __str__(self):
        return self.name


class EndoAction(Action):
    """Action of ``N^d`` by commuting generators ``E_1 .. E_d``."""

    def __init__(self, endos: Sequence[Endo], name: str | None = None, check_depth: int = 3):
        self.endos = tuple(endos)
        self.group = int_vector(len(self.endos))
        self.name = name or "(" + ",".join(str(e) for e in self.endos) + ")"
        self._apply: dict = {}
        self._pre: dict = {}
        if check_depth and len(self.endos) > 1:
            bad = self.commutation_witness(check_depth)
            if bad is not None:
                raise ValueError(f"generators do not commute at {bad}")

    def commutation_witness(self, depth: int):
        for x in sample_points(depth):
            for i, a in enumerate(self.endos):
                for b in self.endos[i + 1:]:
                    if a.apply(b.apply(x)) != b.apply(a.apply(x)):
                        return (str(a), str(b), str(x))
        return None

    def _key(self, n) -> tuple:
        if n.__class__ is LatticeElement:
            return n.value
        if isinstance(n, int):
            return (n,)
        return tuple(n)

    def apply(self, n, x: Word) -> Word:
        key = (self._key(n), x)
        r = self._apply.get(key)
        if r is None:
            r = x
            for e, k in zip(self.endos, key[0]):
                if k < 0:
                    raise ValueError(f"{n} is not in P")
                r = e.power(r, k)
            self._apply[key] = r
        return r

    def preimages(self, n, y: Word) -> tuple:
        v = self._key(n)
        key = (v, y)
        r = self._pre.get(key)
        if r is None:
            if any(k < 0 for k in v):
                raise ValueError(f"{n} is not in P")
            i = next((i for i, k in enumerate(v) if k), None)
            if i is None:
                r = (y,)
            else:
                rest = tuple(k - (j == i) for j, k in enumerate(v))
                acc: dict = {}
                for w in self.endos[i].preimages(y):
                    for x in self.preimages(rest, w):
                        acc[x] = None
                r = tuple(sorted(acc, key=Word.sort_key))
            self._pre[key] = r
        return r

    def samples(self, depth: int) -> tuple:
        return sample_points(depth)

    def growth(self, n) -> int:
        return sum(e.growth * k for e, k in zip(self.endos, self._key(n)))

    def fiber_size(self, n) -> int:
        s = 1
        for e, k in zip(self.endos, self._key(n)):
            s *= e.fiber_size ** k
        return s


class CircleAction(Action):
    """``theta_n(x) = n x mod 1`` for positive integers ``n``."""

    def __init__(self):
        self.group = positive_rationals()
        self.name = "circle"

    def _int(self, n) -> int:
        if isinstance(n, LatticeElement):
            n = n.to_fraction()
        n = Fraction(n)
        if n.denominator != 1 or n < 1:
            raise ValueError(f"{n} is not in P")
        return n.numerator

    def apply(self, n, x: Angle) -> Angle:
        return Angle(self._int(n) * x.value)

    def preimages(self, n, y: Angle) -> tuple:
        return CircleMul(self._int(n)).preimages(y)

    def samples(self, depth: int) -> tuple:
        return sample_angles(depth)

    def fiber_size(self, n) -> int:
        return self._int(n)


def check_star_commuting(s: Endo, t: Endo, depth: int):
    """Search for ``(x, y)`` with ``T(x) = S(y)`` lacking a unique ``z``.

    ``x`` ranges over the depth sample and ``y`` over the whole fiber
    ``S^{-1}(T(x))``.  Returns ``(ok, witness, pairs_checked)`` where the
    witness is ``(x, y, count)``.
    """
    pairs = 0
    for x in sample_points(depth):
        zs = s.preimages(x)
        for y in s.preimages(t.apply(x)):
            pairs += 1
            count = sum(1 for z in zs if t.apply(z) == y)
            if count != 1:
                return False, (x, y, count), pairs
    return True, None, pairs


def relation_compose_member(a: Endo, b: Endo, x: Point, z: Point):
    """Decide ``(x, z)`` in ``R_A o R_B``; returns ``(bool, y)`` with the intermediate point."""
    bz = b.apply(z)
    for y in a.preimages(a.apply(x)):
        if b.apply(y) == bz:
            return True, y
    return False, None


def relation_candidates(a: Endo, b: Endo, x: Point, z: Point) -> list:
    """Every ``y`` with ``(y, z)`` in ``R_B``, paired with whether ``(x, y)`` is in ``R_A``."""
    ax = a.apply(x)
    return [(y, a.apply(y) == ax) for y in b.preimages(b.apply(z))]


LEDRAPPIER_DICT = Dictionary(2, frozenset({"01", "10"}))
COUNTEREXAMPLE_DICT = Dictionary(3, frozenset({"000", "100", "010", "111"}))


def ledrappier_reconstruct(first_row: Word, rows: int, cols: int) -> list[list[int]]:
    """Array with ``x[q+1][p] = x[q][p] + x[q][p+1] mod 2``, row 0 given."""
    if rows < 1 or cols < 1:
        raise ValueError("rows and cols must be positive")
    width = cols + rows
    grid = [[int(b) for b in first_row.first(width)]]
    for q in range(rows - 1):
        prev = grid[-1]
        grid.append([(prev[p] + prev[p + 1]) % 2 for p in range(len(prev) - 1)])
    return [row[:cols] for row in grid]


def check_ledrappier_conjugacy(samples: Iterable[Word], depth: int):
    """Horizontal shift matches S and vertical shift matches T on each sample.

    Returns ``(ok, witness, count)``.
    """
    s, t = Shift(), CellularAutomaton(LEDRAPPIER_DICT)
    count = 0
    rows = 3
    for w in samples:
        count += 1
        a = ledrappier_reconstruct(w, rows, depth + 1)
        h = ledrappier_reconstruct(s.apply(w), rows, depth)
        v = ledrappier_reconstruct(t.apply(w), rows - 1, depth + 1)
        if [row[1:] for row in a] != h:
            return False, (str(w), "horizontal"), count
        if a[1:] != v:
            return False, (str(w), "vertical"), count
        if [int(b) for b in t.apply(w).first(depth + 1)] != a[1]:
            return False, (str(w), "row one"), count
    return True, None, count


def shift_system() -> EndoAction:
    return EndoAction([Shift()], name="shift")


def ledrappier_system() -> EndoAction:
    return EndoAction([Shift(), CellularAutomaton(LEDRAPPIER_DICT)], name="ledrappier")


def counterexample_system(d: Dictionary = COUNTEREXAMPLE_DICT) -> EndoAction:
    return EndoAction([Shift(), CellularAutomaton(d)], name=f"shift+T{d}")


def circle_system() -> CircleAction:
    return CircleAction()
