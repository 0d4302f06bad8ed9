"""Convolution on the transformation groupoid, restricted to the span of
monomials ``u S_n S_m^* v``.

Elements are immutable trees of monomials, adjoints, convolution products,
sums and scalings.  Two evaluation routes are provided:

``row(a, omega, x)``
    the finite map ``(g, y) -> a(x, g, y)`` of nonzero values with source
    ``x``; comparing rows decides an identity at every groupoid element
    with that source.
``value(a, omega, x, g, y)``
    a pointwise evaluation that enumerates only the support of the left
    factor of each product.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .cocycle import Cocycle, check_coherence, check_normalized
from .dynamics import Action, EndoAction
from .groupoid import sample_elements
from .lattice import LatticeElement
from .operators import (
    Base,
    Expr,
    Interaction,
    PreconditionError,
    basis_functions,
    canonical_factorization,
    eval_expr,
    materialize,
)
from .report import Report, timed
from .scalar import Scalar, normalize
from .space import CylinderFunction, Word, all_words

__all__ = [
    "Element",
    "Monomial",
    "Conv",
    "Plus",
    "Scaled",
    "adjoint",
    "S",
    "S_star",
    "pi",
    "sigma",
    "unit",
    "row",
    "value",
    "eval_monomial",
    "adjoint_eval",
    "convolve_eval",
    "sqrt_fraction",
    "PreconditionError",
    "check_isometry",
    "check_semigroup",
    "check_SS_star_formula",
    "check_projection_commutation",
    "check_partial_representation",
    "check_covariance",
    "partition_of_unity",
    "check_adjoint_laws",
    "injectivity_depth",
]


def sqrt_fraction(q) -> Scalar:
    q = Fraction(q)
    if q == 0:
        return Scalar.ZERO
    return normalize(1, q)


def _fval(f, omega: Cocycle, x) -> Scalar:
    if f is None:
        return Scalar.ONE
    if isinstance(f, Expr):
        return eval_expr(f, omega, x)
    return Scalar(f(x))


class Element:
    def __add__(self, other):
        return Plus(self, other)

    def __mul__(self, other):
        if isinstance(other, Element):
            return Conv(self, other)
        return Scaled(Scalar(other), self)

    def __rmul__(self, other):
        return Scaled(Scalar(other), self)

    @property
    def star(self) -> "Element":
        return adjoint(self)


@dataclass(frozen=True)
class Monomial(Element):
    """``u S_n S_m^* v``; ``None`` stands for the constant 1."""

    u: object
    n: LatticeElement
    m: LatticeElement
    v: object

    def __str__(self):
        parts = [] if self.u is None else [f"{self.u}"]
        parts += [f"S[{self.n}]", f"S*[{self.m}]"]
        if self.v is not None:
            parts.append(f"{self.v}")
        return "·".join(parts)


@dataclass(frozen=True)
class Conv(Element):
    a: Element
    b: Element

    def __str__(self):
        return f"({self.a} ⋆ {self.b})"


@dataclass(frozen=True)
class Plus(Element):
    a: Element
    b: Element

    def __str__(self):
        return f"({self.a} + {self.b})"


@dataclass(frozen=True)
class Scaled(Element):
    c: Scalar
    a: Element

    def __str__(self):
        return f"{self.c}·{self.a}"


def adjoint(a: Element) -> Element:
    """Structural adjoint; scalars and functions are real so nothing is conjugated."""
    if isinstance(a, Monomial):
        return Monomial(a.v, a.m, a.n, a.u)
    if isinstance(a, Conv):
        return Conv(adjoint(a.b), adjoint(a.a))
    if isinstance(a, Plus):
        return Plus(adjoint(a.a), adjoint(a.b))
    if isinstance(a, Scaled):
        return Scaled(a.c, adjoint(a.a))
    raise TypeError(type(a).__name__)


def S(action: Action, n) -> Monomial:
    one = action.group.identity
    return Monomial(None, action.elem(n), one, None)


def S_star(action: Action, n) -> Monomial:
    one = action.group.identity
    return Monomial(None, one, action.elem(n), None)


def pi(action: Action, f) -> Monomial:
    one = action.group.identity
    return Monomial(f, one, one, None)


def unit(action: Action) -> Monomial:
    return pi(action, None)


def sigma(action: Action, g, factorization=None) -> Element:
    """``S_n^* S_m`` for ``g = n^{-1} m``."""
    g = action.elem(g)
    n, m = factorization if factorization is not None else canonical_factorization(g)
    if n.inv() * m != g:
        raise ValueError(f"{n}^-1 {m} != {g}")
    return Conv(S_star(action, n), S(action, m))


def _cache(omega: Cocycle) -> dict:
    c = omega.__dict__.get("_row_cache")
    if c is None:
        c = omega.__dict__["_row_cache"] = {}
    return c


def _monomial_row(t: Monomial, omega: Cocycle, x) -> dict:
    a = omega.action
    ux = _fval(t.u, omega, x)
    if not ux:
        return {}
    wn = omega(t.n, x)
    if not wn:
        return {}
    g = t.n * t.m.inv()
    base = ux * sqrt_fraction(wn)
    out = {}
    for y in a.preimages(t.m, a.apply(t.n, x)):
        val = base * sqrt_fraction(omega(t.m, y)) * _fval(t.v, omega, y)
        if val:
            out[(g, y)] = val
    return out


def row(a: Element, omega: Cocycle, x) -> dict:
    """Nonzero values ``(g, y) -> a(x, g, y)``."""
    cache = _cache(omega)
    key = (a, x)
    r = cache.get(key)
    if r is not None:
        return r
    if isinstance(a, Monomial):
        r = _monomial_row(a, omega, x)
    elif isinstance(a, Conv):
        acc: dict = {}
        for (h, z), va in row(a.a, omega, x).items():
            for (k, y), vb in row(a.b, omega, z).items():
                key2 = (h * k, y)
                acc[key2] = acc.get(key2, Scalar.ZERO) + va * vb
        r = {k: v for k, v in acc.items() if v}
    elif isinstance(a, Plus):
        acc = dict(row(a.a, omega, x))
        for k, v in row(a.b, omega, x).items():
            acc[k] = acc.get(k, Scalar.ZERO) + v
        r = {k: v for k, v in acc.items() if v}
    elif isinstance(a, Scaled):
        r = {k: a.c * v for k, v in row(a.a, omega, x).items()} if a.c else {}
    else:
        raise TypeError(type(a).__name__)
    cache[key] = r
    return r


def eval_monomial(t: Monomial, omega: Cocycle, x, g, y) -> Scalar:
    """``u(x) omega(n,x)^{1/2} omega(m,y)^{1/2} v(y) [g = n m^{-1}] [theta_n x = theta_m y]``."""
    a = omega.action
    if g != t.n * t.m.inv() or a.apply(t.n, x) != a.apply(t.m, y):
        return Scalar.ZERO
    return (_fval(t.u, omega, x) * sqrt_fraction(omega(t.n, x))
            * sqrt_fraction(omega(t.m, y)) * _fval(t.v, omega, y))


def value(a: Element, omega: Cocycle, x, g, y) -> Scalar:
    g = omega.action.elem(g)
    if isinstance(a, Monomial):
        return eval_monomial(a, omega, x, g, y)
    if isinstance(a, Conv):
        return convolve_eval(a.a, a.b, omega, x, g, y)
    if isinstance(a, Plus):
        return value(a.a, omega, x, g, y) + value(a.b, omega, x, g, y)
    if isinstance(a, Scaled):
        return a.c * value(a.a, omega, x, g, y)
    raise TypeError(type(a).__name__)


def _support(a: Element, omega: Cocycle, x) -> list:
    """Candidate ``(h, z)`` where ``a(x, h, z)`` may be nonzero, enumerated from monomials."""
    act = omega.action
    if isinstance(a, Monomial):
        return [(a.n * a.m.inv(), z) for z in act.preimages(a.m, act.apply(a.n, x))]
    if isinstance(a, Conv):
        out = {}
        for h, z in _support(a.a, omega, x):
            for k, y in _support(a.b, omega, z):
                out[(h * k, y)] = None
        return list(out)
    if isinstance(a, Plus):
        return list(dict.fromkeys(_support(a.a, omega, x) + _support(a.b, omega, x)))
    if isinstance(a, Scaled):
        return _support(a.a, omega, x)
    raise TypeError(type(a).__name__)


def convolve_eval(a: Element, b: Element, omega: Cocycle, x, g, y) -> Scalar:
    """``sum over (x,h,z) of a(x,h,z) b(z, h^{-1} g, y)``."""
    g = omega.action.elem(g)
    total = Scalar.ZERO
    for h, z in _support(a, omega, x):
        va = value(a, omega, x, h, z)
        if va:
            total = total + va * value(b, omega, z, h.inv() * g, y)
    return total


def adjoint_eval(a: Element, omega: Cocycle, x, g, y) -> Scalar:
    """``a^*(x, g, y) = a(y, g^{-1}, x)``."""
    return value(a, omega, y, omega.action.elem(g).inv(), x)


# checks


def _rows_differ(lhs: Element, rhs: Element, omega: Cocycle, points) -> object:
    for x in points:
        r1, r2 = row(lhs, omega, x), row(rhs, omega, x)
        if r1 != r2:
            k = next(k for k in set(r1) | set(r2) if r1.get(k, Scalar.ZERO) != r2.get(k, Scalar.ZERO))
            return {"x": x, "g": k[0], "y": k[1],
                    "lhs": r1.get(k, Scalar.ZERO), "rhs": r2.get(k, Scalar.ZERO)}
    return None


def _pointwise_differ(lhs: Element, rhs: Element, omega: Cocycle, elements) -> object:
    """Second route: pointwise values at sampled groupoid elements, checked against the rows."""
    for e in elements:
        v1 = value(lhs, omega, e.x, e.g, e.y)
        v2 = value(rhs, omega, e.x, e.g, e.y)
        r = row(lhs, omega, e.x).get((e.g, e.y), Scalar.ZERO)
        if v1 != v2 or v1 != r:
            return {"element": str(e), "lhs": v1, "rhs": v2, "row": r}
    return None


def _elements(action: Action, depth: int, bound: int, limit: int) -> list:
    out = []
    for e in sample_elements(action, min(depth, 2), bound):
        out.append(e)
        if len(out) >= limit:
            break
    return out


def _points(action: Action, depth: int):
    return action.samples(depth)


def check_isometry(omega: Cocycle, depth: int = 3, bound: int = 2, pointwise: int = 60) -> Report:
    a = omega.action
    rep = Report("isometry", ref="S_n^* S_n = 1")
    pts = _points(a, depth)
    els = _elements(a, depth, bound, pointwise)
    with timed(rep):
        for n in a.box(bound):
            rep.samples += len(pts)
            lhs = Conv(S_star(a, n), S(a, n))
            w = _rows_differ(lhs, unit(a), omega, pts) or _pointwise_differ(lhs, unit(a), omega, els)
            if w:
                rep.fail({"n": n, **w})
    return rep


def check_semigroup(omega: Cocycle, depth: int = 3, bound: int = 2, pointwise: int = 60) -> Report:
    a = omega.action
    rep = Report("semigroup", ref="S_n S_m = S_nm")
    pts = _points(a, depth)
    els = _elements(a, depth, bound, pointwise)
    with timed(rep):
        for n in a.box(bound):
            for m in a.box(bound):
                rep.samples += len(pts)
                lhs, rhs = Conv(S(a, n), S(a, m)), S(a, n * m)
                w = _rows_differ(lhs, rhs, omega, pts) or _pointwise_differ(lhs, rhs, omega, els[:10])
                if w:
                    rep.fail({"n": n, "m": m, **w})
    return rep


def check_SS_star_formula(omega: Cocycle, depth: int = 3, bound: int = 2) -> Report:
    """``S_n S_n^*(x,g,y) = omega(n,x)^{1/2} omega(n,y)^{1/2} [g=1] [theta_n x = theta_n y]``."""
    a = omega.action
    rep = Report("SS_star_formula", ref="S_nS_n^*(x,g,y) = w(n,x)^1/2 w(n,y)^1/2 [g=1][theta_n x = theta_n y]")
    one = a.group.identity
    with timed(rep):
        for n in a.box(bound):
            p = Conv(S(a, n), S_star(a, n))
            for x in _points(a, depth):
                rep.samples += 1
                oracle = {}
                for y in a.fiber_class(n, x):
                    v = sqrt_fraction(omega(n, x)) * sqrt_fraction(omega(n, y))
                    if v:
                        oracle[(one, y)] = v
                if row(p, omega, x) != oracle:
                    rep.fail({"n": n, "x": x, "row": row(p, omega, x), "oracle": oracle})
    return rep


def _standing_hypotheses(omega: Cocycle, depth: int, bound: int) -> None:
    a = omega.action
    for r in (check_normalized(omega, depth, bound), check_coherence(omega, depth, bound, stop_on_fail=True)):
        if not r:
            raise PreconditionError(f"{r.check} fails: {r.witnesses[:1]}")
    for x in a.samples(depth):
        for n in a.box(bound):
            if omega(n, x) == 0:
                raise PreconditionError(f"omega vanishes at ({n}, {x})")


def lemma_identities(omega: Cocycle, n, m, x, z) -> tuple:
    """Both sides of the two exchange identities at ``(x, z)``.

    (i)  W_m(C^n_x & C^m_x) W_n(C^m_x & C^n_z)
    (ii) sum over y in C^m_x & C^n_z of
         (omega(m,y) omega(n,y) omega(m,x) omega(n,z))^{1/2}
    Returns ``((i)(n,m), (i)(m,n), (ii)(n,m), (ii)(m,n))``.
    """
    a = omega.action

    def inter(p, q, s, t):
        # C^p_s & C^q_t
        target = a.apply(q, t)
        return [y for y in a.fiber_class(p, s) if a.apply(q, y) == target]

    def W(p, ys):
        return sum((omega(p, y) for y in ys), Fraction(0))

    def first(n, m):
        return W(m, inter(n, m, x, x)) * W(n, inter(m, n, x, z))

    def second(n, m):
        total = Scalar.ZERO
        for y in inter(m, n, x, z):
            total = total + sqrt_fraction(omega(m, y) * omega(n, y) * omega(m, x) * omega(n, z))
        return total

    return first(n, m), first(m, n), second(n, m), second(m, n)


def check_projection_commutation(omega: Cocycle, depth: int = 3, bound: int = 2,
                                 check_preconditions: bool = True) -> Report:
    """``S_mS_m^*`` and ``S_nS_n^*`` commute, together with both exchange identities."""
    a = omega.action
    if check_preconditions:
        _standing_hypotheses(omega, depth, bound)
    rep = Report("projection_commutation",
                 ref="S_mS_m^* S_nS_n^* = S_nS_n^* S_mS_m^*; exchange identities (i), (ii)")
    pts = _points(a, depth)
    box = a.box(bound)
    lemma = {"i": 0, "ii": 0}
    with timed(rep):
        for i, n in enumerate(box):
            pn = Conv(S(a, n), S_star(a, n))
            for m in box[i + 1:]:
                pm = Conv(S(a, m), S_star(a, m))
                rep.samples += len(pts)
                w = _rows_differ(Conv(pm, pn), Conv(pn, pm), omega, pts)
                if w:
                    rep.fail({"identity": "projections commute", "n": n, "m": m, **w})
                for x in pts:
                    zs = dict.fromkeys(pts)
                    for y in a.fiber_class(m, x):
                        for z in a.fiber_class(n, y):
                            zs[z] = None
                    for z in zs:
                        i1, i2, s1, s2 = lemma_identities(omega, n, m, x, z)
                        lemma["i"] += 1
                        lemma["ii"] += 1
                        if i1 != i2:
                            rep.fail({"identity": "exchange (i)", "n": n, "m": m, "x": x, "z": z,
                                      "lhs": i1, "rhs": i2})
                        if s1 != s2:
                            rep.fail({"identity": "exchange (ii)", "n": n, "m": m, "x": x, "z": z,
                                      "lhs": s1, "rhs": s2})
        rep.details = {"lemma_instances": lemma}
    return rep


def check_partial_representation(omega: Cocycle, depth: int = 3, bound: int = 2, pad: int = 1) -> Report:
    """``sigma_g = S_n^* S_m`` is well defined and a partial representation.

    Checks ``sigma_n = S_n``, ``sigma_{g^{-1}} = sigma_g^*``, agreement across
    the factorizations ``(n, m)`` and ``(pn, pm)``, and
    ``sigma_g sigma_h sigma_{h^{-1}} = sigma_{gh} sigma_{h^{-1}}``.
    """
    a = omega.action
    rep = Report("partial_representation",
                 ref="sigma_g sigma_h sigma_h^-1 = sigma_gh sigma_h^-1; sigma_g = S_n^* S_m")
    pts = _points(a, depth)
    gbox = a.g_box(bound)
    counts = {"sigma_n": 0, "adjoint": 0, "factorization": 0, "law": 0}
    with timed(rep):
        for n in a.box(bound):
            counts["sigma_n"] += 1
            w = _rows_differ(sigma(a, n), S(a, n), omega, pts)
            if w:
                rep.fail({"identity": "sigma_n = S_n", "n": n, **w})
        for g in gbox:
            counts["adjoint"] += 1
            w = _rows_differ(sigma(a, g.inv()), adjoint(sigma(a, g)), omega, pts)
            if w:
                rep.fail({"identity": "sigma_g^-1 = sigma_g^*", "g": g, **w})
            n, m = canonical_factorization(g)
            for p in a.box(pad):
                if p.is_identity():
                    continue
                counts["factorization"] += 1
                w = _rows_differ(sigma(a, g), sigma(a, g, (p * n, p * m)), omega, pts)
                if w:
                    rep.fail({"identity": "factorization", "g": g, "p": p, **w})
        for g in gbox:
            for h in gbox:
                counts["law"] += 1
                lhs = Conv(Conv(sigma(a, g), sigma(a, h)), sigma(a, h.inv()))
                rhs = Conv(sigma(a, g * h), sigma(a, h.inv()))
                w = _rows_differ(lhs, rhs, omega, pts)
                if w:
                    rep.fail({"identity": "partial representation", "g": g, "h": h, **w})
        rep.samples = sum(counts.values()) * len(pts)
        rep.details = {"instances": counts}
    return rep


def _case(g: LatticeElement) -> str:
    if g.in_p():
        return "1"
    if g.inv().in_p():
        return "2"
    return "3"


def check_covariance(omega: Cocycle, depth: int = 3, bound: int = 2) -> Report:
    """``sigma_g pi(f) sigma_{g^{-1}} = pi(V_g f) sigma_g sigma_{g^{-1}}`` on the basis."""
    a = omega.action
    rep = Report("covariance", ref="sigma_g pi(f) sigma_g^-1 = pi(V_g(f)) sigma_g sigma_g^-1")
    pts = _points(a, depth)
    full_shift = isinstance(a, EndoAction)
    cases = {"1": 0, "2": 0, "3": 0}
    with timed(rep):
        for g in a.g_box(bound):
            sg, sgi = sigma(a, g), sigma(a, g.inv())
            for f in basis_functions(a):
                vg = Interaction(g, Base(f))
                vgf = materialize(vg, omega) if full_shift else vg
                lhs = Conv(Conv(sg, pi(a, f)), sgi)
                rhs = Conv(Conv(pi(a, vgf), sg), sgi)
                cases[_case(g)] += 1
                rep.samples += len(pts)
                w = _rows_differ(lhs, rhs, omega, pts)
                if w:
                    rep.fail({"case": _case(g), "g": g, "f": str(f), **w})
        rep.details = {"cases": cases}
    return rep


def injectivity_depth(action: EndoAction, n, depth: int, samples) -> object:
    """None if ``theta_n`` is injective on every depth-``depth`` cylinder over the samples,
    else a witness pair."""
    n = action.elem(n)
    for x in samples:
        w = x.first(depth)
        for y in action.fiber_class(n, x):
            if y != x and y.first(depth) == w:
                return (x, y)
    return None


def partition_of_unity(omega: Cocycle, n, depth: int = 3, cells: int | None = None) -> Report:
    """``sum_i pi(u_i) S_nS_n^* pi(u_i) = 1`` with ``u_i = 1_{[w_i]} omega(n, .)^{-1/2}``.

    The cells are the cylinders of length ``cells``, by default the growth
    of ``theta_n``; injectivity of ``theta_n`` on each cell is checked by
    enumeration over the sample set first.
    """
    a = omega.action
    if not isinstance(a, EndoAction):
        raise TypeError("partition of unity needs the full shift")
    n = a.elem(n)
    k = a.growth(n) if cells is None else cells
    rep = Report("partition_of_unity", ref="sum_i pi(u_i) S_nS_n^* pi(u_i) = 1")
    pts = _points(a, depth)
    with timed(rep):
        bad = injectivity_depth(a, n, k, pts)
        if bad is not None:
            raise PreconditionError(f"theta_{n} not injective on depth-{k} cylinders: {bad}")
        loc = omega.locality(n) if callable(omega.locality) else omega.locality
        if loc > k:
            raise PreconditionError(f"omega(n, .) depends on {loc} > {k} coordinates")
        total = None
        pn = Conv(S(a, n), S_star(a, n))
        for w in all_words(k):
            inv_sqrt = sqrt_fraction(1 / omega(n, Word(w, "0")))
            u = CylinderFunction.indicator(w).scale(inv_sqrt)
            term = Conv(Conv(pi(a, u), pn), pi(a, u))
            total = term if total is None else Plus(total, term)
        rep.samples = len(pts)
        w = _rows_differ(total, unit(a), omega, pts)
        if w:
            rep.fail({"n": n, **w})
        rep.details = {"n": n, "cells": 1 << k, "cell_depth": k}
    return rep


def check_adjoint_laws(omega: Cocycle, depth: int = 2, bound: int = 1, limit: int = 150) -> Report:
    """``a^{**} = a``, ``(a b)^* = b^* a^*``, structural adjoint equals ``adjoint_eval``, associativity."""
    a = omega.action
    rep = Report("adjoint_laws", ref="(ab)^* = b^*a^*; a^** = a; (ab)c = a(bc)")
    box = a.box(bound)
    f = basis_functions(a)[-1]
    mons = [Monomial(f if i % 2 else None, n, m, None if i % 3 else f)
            for i, (n, m) in enumerate((n, m) for n in box for m in box)]
    els = _elements(a, depth, bound, limit)
    pts = _points(a, depth)
    with timed(rep):
        for i, x1 in enumerate(mons):
            y1 = mons[(i + 1) % len(mons)]
            z1 = mons[(i + 2) % len(mons)]
            prod = Conv(x1, y1)
            rep.samples += 1
            if adjoint(adjoint(x1)) != x1:
                rep.fail({"law": "involution", "a": str(x1)})
            w = _rows_differ(adjoint(prod), Conv(adjoint(y1), adjoint(x1)), omega, pts)
            if w:
                rep.fail({"law": "anti-multiplicative", "a": str(x1), "b": str(y1), **w})
            w = _rows_differ(Conv(prod, z1), Conv(x1, Conv(y1, z1)), omega, pts)
            if w:
                rep.fail({"law": "associative", "a": str(x1), "b": str(y1), "c": str(z1), **w})
            for e in els[: max(1, limit // len(mons))]:
                if adjoint_eval(prod, omega, e.x, e.g, e.y) != value(adjoint(prod), omega, e.x, e.g, e.y):
                    rep.fail({"law": "adjoint_eval", "a": str(prod), "element": str(e)})
    return rep
