"""The transformation groupoid of an action, admissibility, and the
polymorphism groupoid of a commuting pair (S, T)."""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Iterator, Sequence

from .cocycle import box_mini_squares
from .dynamics import Action, CircleAction, EndoAction
from .lattice import LatticeElement, MiniSquare, mini_square_from_pair
from .report import Report, timed
from .space import CylinderSet, Word

__all__ = [
    "GroupoidElement",
    "PolyElement",
    "BasicBisection",
    "Membership",
    "GroupoidError",
    "AdmissibilityError",
    "unit",
    "compose",
    "inverse",
    "membership",
    "sample_elements",
    "composable_pairs",
    "check_groupoid_axioms",
    "check_admissible_action",
    "preimage_intersection",
    "check_preimage_intersection",
    "class_product_bijection",
    "poly_membership",
    "poly_compose",
    "poly_inverse",
    "d",
    "phi",
    "phi_inverse",
    "check_poly_groupoid",
]


class GroupoidError(ValueError):
    pass


class AdmissibilityError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class GroupoidElement:
    """``(x, g, y)`` with a witness ``(n, m)``: ``g = n m^{-1}`` and ``theta_n(x) = theta_m(y)``.

    Equality and hashing ignore the witness.
    """

    action: Action
    x: object
    g: LatticeElement
    y: object
    n: LatticeElement
    m: LatticeElement

    def __post_init__(self):
        a = self.action
        if not (self.n.in_p() and self.m.in_p()):
            raise GroupoidError(f"witness ({self.n}, {self.m}) not in P x P")
        if self.n * self.m.inv() != self.g:
            raise GroupoidError(f"{self.n} {self.m}^-1 != {self.g}")
        if a.apply(self.n, self.x) != a.apply(self.m, self.y):
            raise GroupoidError(f"theta_{self.n}({self.x}) != theta_{self.m}({self.y})")

    def key(self) -> tuple:
        return (self.x, self.g, self.y)

    def __eq__(self, other):
        return isinstance(other, GroupoidElement) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def is_unit(self) -> bool:
        return self.g.is_identity() and self.x == self.y

    def __str__(self):
        return f"({self.x} ; {self.g} ; {self.y}) via ({self.n},{self.m})"

    def __repr__(self):
        return f"GroupoidElement{self}"


def unit(action: Action, x) -> GroupoidElement:
    one = action.group.identity
    return GroupoidElement(action, x, one, x, one, one)


def compose(e1: GroupoidElement, e2: GroupoidElement) -> GroupoidElement:
    """``(x, g, y)(y, h, z) = (x, gh, z)``.

    With witnesses ``(n, m)`` and ``(p, q)``, write ``m^{-1} p = u v^{-1}``
    using the mini-square of ``(m, p)``; the product has witness ``(nu, qv)``.
    """
    if e1.y != e2.x:
        raise GroupoidError(f"{e1} and {e2} are not composable")
    ms = mini_square_from_pair(e1.m, e2.n)
    u, v = ms.u, ms.v
    return GroupoidElement(e1.action, e1.x, e1.g * e2.g, e2.y, e1.n * u, e2.m * v)


def inverse(e: GroupoidElement) -> GroupoidElement:
    return GroupoidElement(e.action, e.y, e.g.inv(), e.x, e.m, e.n)


@dataclass(frozen=True)
class Membership:
    """Three-valued answer: ``"yes"`` with an element, ``"no"`` with a proof note, or ``"unknown"``."""

    status: str
    element: GroupoidElement | None = None
    note: str = ""

    def __bool__(self):
        return self.status == "yes"


def _sync_search(action: EndoAction, a, b, limit: int):
    """Breadth-first search for ``c`` in P with ``theta_c(a) = theta_c(b)``.

    The states ``(theta_c a, theta_c b)`` range over a finite set because
    every generator maps eventually periodic words to words with no longer
    prefix and a cycle length dividing the original; so the search either
    finds ``c`` or exhausts the reachable states.  Returns ``(c, closed)``.
    """
    grp = action.group
    start = (a, b)
    seen = {start: grp.identity}
    queue = deque([start])
    while queue:
        s = queue.popleft()
        c = seen[s]
        if s[0] == s[1]:
            return c, True
        for i, e in enumerate(action.endos):
            nxt = (e.apply(s[0]), e.apply(s[1]))
            if nxt not in seen:
                if len(seen) >= limit:
                    return None, False
                seen[nxt] = c * grp.unit(i)
                queue.append(nxt)
    return None, True


def membership(action: Action, x, g, y, bound: int = 3, limit: int = 100_000) -> Membership:
    g = action.elem(g)
    one = action.group.identity
    n0, m0 = g | one, g.inv() | one
    for c in action.box(bound):
        n, m = n0 * c, m0 * c
        if action.apply(n, x) == action.apply(m, y):
            return Membership("yes", GroupoidElement(action, x, g, y, n, m), f"witness in box {bound}")
    a, b = action.apply(n0, x), action.apply(m0, y)
    if isinstance(action, CircleAction):
        # c (a - b) is an integer exactly when the denominator of a - b divides c
        c = action.elem((a.value - b.value).denominator)
        return Membership("yes", GroupoidElement(action, x, g, y, n0 * c, m0 * c), "denominator of a - b")
    if isinstance(action, EndoAction):
        c, closed = _sync_search(action, a, b, limit)
        if c is not None:
            return Membership("yes", GroupoidElement(action, x, g, y, n0 * c, m0 * c), "synchronizing search")
        if closed:
            return Membership("no", None, "reachable pair states exhausted without synchronizing")
    return Membership("unknown", None, f"no witness in box {bound}")


def sample_elements(action: Action, depth: int, bound: int) -> Iterator[GroupoidElement]:
    """``(x, n m^{-1}, y)`` for sampled ``x``, ``n, m`` in the box and ``y`` in the fiber."""
    box = action.box(bound)
    for x in action.samples(depth):
        for n in box:
            t = action.apply(n, x)
            for m in box:
                for y in action.preimages(m, t):
                    yield GroupoidElement(action, x, n * m.inv(), y, n, m)


def composable_pairs(action: Action, depth: int, bound: int, count: int) -> list[tuple]:
    """Deterministic composable pairs ``(e1, e2)`` with ``e1.y = e2.x``.

    The second factor's witness and fiber point cycle with the pair index.
    """
    out = []
    box = action.box(bound)
    pq = list(itertools.product(box, box))
    for e1 in sample_elements(action, depth, bound):
        i = len(out)
        p, q = pq[i % len(pq)]
        pre = action.preimages(q, action.apply(p, e1.y))
        z = pre[i % len(pre)]
        out.append((e1, GroupoidElement(action, e1.y, p * q.inv(), z, p, q)))
        if len(out) >= count:
            break
    return out


def check_groupoid_axioms(action: Action, depth: int = 3, bound: int = 1, count: int = 200) -> Report:
    rep = Report("groupoid_axioms", ref="(x,g,y)(y,h,z) = (x,gh,z); (x,g,y)^-1 = (y,g^-1,x)")
    with timed(rep):
        pairs = composable_pairs(action, depth, bound, count)
        for e1, e2 in pairs:
            rep.samples += 1
            e12 = compose(e1, e2)
            # witness recomposition: nu (qv)^{-1} = gh
            if e12.n * e12.m.inv() != e1.g * e2.g:
                rep.fail({"law": "witness recomposition", "e1": e1, "e2": e2})
            if not compose(e1, inverse(e1)).is_unit() or compose(e1, inverse(e1)).x != e1.x:
                rep.fail({"law": "e e^-1 unit", "e": e1})
            if not compose(inverse(e1), e1).is_unit() or compose(inverse(e1), e1).x != e1.y:
                rep.fail({"law": "e^-1 e unit", "e": e1})
            if inverse(inverse(e1)) != e1:
                rep.fail({"law": "involution", "e": e1})
            if compose(unit(action, e1.x), e1) != e1 or compose(e1, unit(action, e1.y)) != e1:
                rep.fail({"law": "units", "e": e1})
            if inverse(e12) != compose(inverse(e2), inverse(e1)):
                rep.fail({"law": "inverse of product", "e1": e1, "e2": e2})
            e3 = inverse(e2)
            if compose(compose(e1, e2), e3) != compose(e1, compose(e2, e3)):
                rep.fail({"law": "associativity", "e1": e1, "e2": e2, "e3": e3})
        rep.details = {"composable_pairs": len(pairs)}
    return rep


def check_admissible_action(action: Action, depth: int = 4, bound=2,
                            mini_squares: Sequence[MiniSquare] | None = None) -> Report:
    """Unique ``z`` with ``theta_s z = x`` and ``theta_t z = y`` whenever ``theta_u x = theta_v y``."""
    rep = Report("admissible_action", ref="theta_u(x) = theta_v(y) => unique z: theta_s z = x, theta_t z = y")
    squares = list(mini_squares) if mini_squares is not None else box_mini_squares(action, bound)
    with timed(rep):
        for ms in squares:
            for x in action.samples(depth):
                zs = action.preimages(ms.s, x)
                for y in action.preimages(ms.v, action.apply(ms.u, x)):
                    rep.samples += 1
                    count = sum(1 for z in zs if action.apply(ms.t, z) == y)
                    if count != 1:
                        rep.fail({"mini_square": str(ms), "x": x, "y": y, "count": count})
        rep.details = {"mini_squares": len(squares)}
    return rep


def preimage_intersection(action: Action, n, m, p, q) -> tuple:
    """``theta_m^{-1}(p) & theta_n^{-1}(q)``: empty, or the ``theta_{m meet n}`` fiber over ``w``."""
    n, m = action.elem(n), action.elem(m)
    ms = mini_square_from_pair(m, n)
    if action.apply(ms.u, p) != action.apply(ms.v, q):
        return ()
    ws = [w for w in action.preimages(ms.s, p) if action.apply(ms.t, w) == q]
    if len(ws) != 1:
        raise AdmissibilityError(f"{len(ws)} common lifts of ({p}, {q}) for {ms}")
    return action.preimages(m & n, ws[0])


def check_preimage_intersection(action: Action, depth: int = 3, bound: int = 1) -> Report:
    """Formula against brute-force intersection on every sampled instance.

    Instances are all ``(p, q)`` pairs of samples, plus ``(p, theta_n x)`` for
    each ``x`` over ``p`` so the nonempty case is exercised.
    """
    rep = Report("preimage_intersection", ref="theta_m^-1(p) & theta_n^-1(q) = theta_(m meet n)^-1(w)")
    pts = action.samples(depth)
    box = action.box(bound)
    nonempty = 0
    with timed(rep):
        for m in box:
            for n in box:
                for p in pts:
                    qs = dict.fromkeys(pts)
                    for x in action.preimages(m, p):
                        qs[action.apply(n, x)] = None
                    pre_m = set(action.preimages(m, p))
                    for q in qs:
                        rep.samples += 1
                        brute = pre_m & set(action.preimages(n, q))
                        try:
                            formula = set(preimage_intersection(action, n, m, p, q))
                        except AdmissibilityError as exc:
                            rep.fail({"m": m, "n": n, "p": p, "q": q, "error": str(exc)})
                            continue
                        nonempty += bool(brute)
                        if formula != brute:
                            rep.fail({"m": m, "n": n, "p": p, "q": q,
                                      "formula": sorted(map(str, formula)), "brute": sorted(map(str, brute))})
        rep.details = {"nonempty_instances": nonempty}
    return rep


def class_product_bijection(action: Action, ms: MiniSquare, zbar) -> Report:
    """``z -> (theta_s z, theta_t z)`` maps ``C^{s v t}_zbar`` onto ``C^u_xbar x C^v_ybar`` bijectively."""
    rep = Report("class_product_bijection", ref="phi(z) = (theta_s z, theta_t z) is a bijection")
    with timed(rep):
        xbar, ybar = action.apply(ms.s, zbar), action.apply(ms.t, zbar)
        domain = action.fiber_class(ms.s | ms.t, zbar)
        images = [(action.apply(ms.s, z), action.apply(ms.t, z)) for z in domain]
        target = {(a, b) for a in action.fiber_class(ms.u, xbar) for b in action.fiber_class(ms.v, ybar)}
        rep.samples = len(domain)
        cu, cv = len(action.fiber_class(ms.u, xbar)), len(action.fiber_class(ms.v, ybar))
        rep.details = {"mini_square": str(ms), "z": zbar, "domain": len(domain), "C_u": cu, "C_v": cv}
        if len(set(images)) != len(images):
            rep.fail({"reason": "not injective", "mini_square": str(ms), "z": zbar})
        if set(images) != target:
            rep.fail({"reason": "image differs from product", "mini_square": str(ms), "z": zbar})
        if len(domain) != cu * cv:
            rep.fail({"reason": "cardinality", "domain": len(domain), "product": cu * cv})
    return rep


@dataclass(frozen=True)
class BasicBisection:
    """The open bisection of elements ``(x, n m^{-1}, y)`` with ``x`` in A, ``y`` in B, ``theta_n x = theta_m y``."""

    n: LatticeElement
    m: LatticeElement
    A: CylinderSet
    B: CylinderSet

    def contains(self, e: GroupoidElement) -> bool:
        a = e.action
        return (self.A.contains(e.x) and self.B.contains(e.y)
                and e.g == self.n * self.m.inv()
                and a.apply(self.n, e.x) == a.apply(self.m, e.y))

    def __str__(self):
        return f"Sigma({self.n}, {self.m}, {self.A}, {self.B})"


# polymorphism groupoid


@dataclass(frozen=True, eq=False)
class PolyElement:
    """``(x, k, y)`` with witness ``(n, m)``: ``k = n - m`` and ``S^n T^m x = S^m T^n y``."""

    action: EndoAction
    x: Word
    k: int
    y: Word
    n: int
    m: int

    def __post_init__(self):
        if self.n < 0 or self.m < 0 or self.n - self.m != self.k:
            raise GroupoidError(f"bad witness ({self.n}, {self.m}) for k={self.k}")
        a = self.action
        if a.apply((self.n, self.m), self.x) != a.apply((self.m, self.n), self.y):
            raise GroupoidError(f"S^{self.n}T^{self.m}({self.x}) != S^{self.m}T^{self.n}({self.y})")

    def key(self) -> tuple:
        return (self.x, self.k, self.y)

    def __eq__(self, other):
        return isinstance(other, PolyElement) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __str__(self):
        return f"({self.x} ; {self.k} ; {self.y}) via ({self.n},{self.m})"

    __repr__ = __str__


def poly_membership(action: EndoAction, x, k: int, y, limit: int = 100_000) -> Membership:
    """Decide ``(x, k, y)`` in H.  Witnesses are ``(m + k, m)``; raising ``m`` by one
    applies ``ST`` to both sides, so the pair sequence is eventually periodic."""
    m = max(0, -k)
    st = action.group((1, 1))
    a, b = action.apply((m + k, m), x), action.apply((m, m + k), y)
    seen = set()
    while (a, b) not in seen and len(seen) < limit:
        if a == b:
            return Membership("yes", PolyElement(action, x, k, y, m + k, m))
        seen.add((a, b))
        a, b = action.apply(st, a), action.apply(st, b)
        m += 1
    if len(seen) >= limit:
        return Membership("unknown", None, "search limit reached")
    return Membership("no", None, "pair sequence cycled without meeting")


def phi(e: PolyElement) -> GroupoidElement:
    """``(x, k, y) -> (x, (k, -k), y)``."""
    a = e.action
    return GroupoidElement(a, e.x, a.group((e.k, -e.k)), e.y, a.group((e.n, e.m)), a.group((e.m, e.n)))


def d(e: GroupoidElement) -> int:
    """``d(x, (a, b), y) = a + b``."""
    return e.g[0] + e.g[1]


def phi_inverse(e: GroupoidElement) -> PolyElement:
    """Back-fill an H witness for an element of the kernel of ``d``."""
    if d(e) != 0:
        raise GroupoidError(f"{e} is not in the kernel of d")
    p, q = e.n.value
    r, s = e.m.value
    l = max(0, p - s)
    k = l + s - p
    return PolyElement(e.action, e.x, e.g[0], e.y, p + k, q + l)


def poly_compose(e1: PolyElement, e2: PolyElement) -> PolyElement:
    return phi_inverse(compose(phi(e1), phi(e2)))


def poly_inverse(e: PolyElement) -> PolyElement:
    return PolyElement(e.action, e.y, -e.k, e.x, e.m, e.n)


def check_poly_groupoid(action: EndoAction, depth: int = 3, bound: int = 2, count: int = 200) -> Report:
    """``d`` is additive, ``phi`` lands in the kernel of ``d``, and ``phi`` respects
    composition and inverses on sampled H elements."""
    rep = Report("poly_groupoid", ref="d(x,(n,m),y) = n+m; phi: H -> ker d")
    with timed(rep):
        elems = []
        for x in action.samples(depth):
            for n in range(bound + 1):
                for m in range(bound + 1):
                    t = action.apply((n, m), x)
                    for y in action.preimages((m, n), t):
                        elems.append(PolyElement(action, x, n - m, y, n, m))
        by_source: dict = {}
        for e in elems:
            by_source.setdefault(e.x, []).append(e)
        pairs = 0
        for e1 in elems:
            rep.samples += 1
            g1 = phi(e1)
            if d(g1) != 0:
                rep.fail({"law": "phi in ker d", "e": e1})
            if phi_inverse(g1) != e1:
                rep.fail({"law": "phi_inverse phi = id", "e": e1})
            if phi(poly_inverse(e1)) != inverse(g1):
                rep.fail({"law": "phi inverse", "e": e1})
            if pairs < count:
                for e2 in by_source.get(e1.y, [])[:3]:
                    pairs += 1
                    h = poly_compose(e1, e2)
                    if h.k != e1.k + e2.k or phi(h) != compose(g1, phi(e2)):
                        rep.fail({"law": "phi homomorphism", "e1": e1, "e2": e2})
        # d additive on general G elements
        gpairs = composable_pairs(action, depth, 1, count)
        for a1, a2 in gpairs:
            if d(compose(a1, a2)) != d(a1) + d(a2):
                rep.fail({"law": "d additive", "e1": a1, "e2": a2})
        rep.details = {"H_elements": len(elems), "H_pairs": pairs, "G_pairs": len(gpairs)}
    return rep
