"""Cocycles, fiber classes, weight sums and the checks built on them."""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .dynamics import Action, CircleAction, EndoAction, Endo, check_star_commuting
from .lattice import LatticeElement, MiniSquare, mini_square_from_pair
from .report import Report, timed

__all__ = [
    "Cocycle",
    "StarCommutationError",
    "fiber_class",
    "weight_sum",
    "class_intersection",
    "check_normalized",
    "check_cocycle_identity",
    "check_coherence",
    "check_admissible_cocycle",
    "check_relation_commutation_implication",
    "check_cross_invariance",
    "relation_witness",
    "build_iterate_cocycle",
    "build_product_cocycle",
    "circle_cocycle",
    "box_mini_squares",
]


class StarCommutationError(ValueError):
    pass


class Cocycle:
    """``omega(n, x)``: a nonnegative rational for ``n`` in P and ``x`` in X.

    ``locality`` is the number of leading coordinates of ``x`` that
    ``omega(n, x)`` depends on, as an int or a function of ``n``.
    """

    def __init__(self, action: Action, fn: Callable[[LatticeElement, object], Fraction],
                 name: str = "omega", positive: bool = False, locality=0):
        self.action = action
        self.locality = locality
        self._fn = fn
        self.name = name
        self.positive = positive
        self._cache: dict = {}

    def __call__(self, n, x) -> Fraction:
        key = (n, x)
        r = self._cache.get(key)
        if r is None:
            if not isinstance(n, LatticeElement):
                return self(self.action.elem(n), x)
            r = self._cache[key] = Fraction(self._fn(self.action.elem(n), x))
        return r

    def __str__(self):
        return self.name


def fiber_class(action: Action, n, y) -> tuple:
    """``C^n_y``: all points with the same ``theta_n`` image as ``y``."""
    return action.fiber_class(n, y)


def weight_sum(omega: Cocycle, n, points: Iterable) -> Fraction:
    return sum((omega(n, p) for p in points), Fraction(0))


def class_intersection(action: Action, n, m, x, z) -> tuple:
    """``C^n_x`` intersected with ``C^m_z``."""
    target = action.apply(m, z)
    return tuple(y for y in fiber_class(action, n, x) if action.apply(m, y) == target)


def _box(action: Action, bound) -> list:
    if isinstance(bound, int):
        return action.box(bound)
    return [action.elem(b) for b in bound]


def check_normalized(omega: Cocycle, depth: int = 4, bound=3) -> Report:
    """Fiber sums of omega equal one."""
    a = omega.action
    rep = Report("normalized", ref="sum over theta_n(x)=y of omega(n,x) = 1")
    with timed(rep):
        for y in a.samples(depth):
            for n in _box(a, bound):
                total = weight_sum(omega, n, a.preimages(n, y))
                rep.samples += 1
                if total != 1:
                    rep.fail({"n": n, "y": y, "sum": total})
    return rep


def check_cocycle_identity(omega: Cocycle, depth: int = 4, bound=3) -> Report:
    a = omega.action
    rep = Report("cocycle_identity", ref="omega(nm,x) = omega(n,x) omega(m,theta_n(x))")
    box = _box(a, bound)
    with timed(rep):
        for x in a.samples(depth):
            for n in box:
                wn = omega(n, x)
                xn = a.apply(n, x)
                for m in box:
                    rep.samples += 1
                    lhs = omega(n * m, x)
                    rhs = wn * omega(m, xn)
                    if lhs != rhs:
                        rep.fail({"n": n, "m": m, "x": x, "lhs": lhs, "rhs": rhs})
    return rep


def _image_index(a: Action, n, points) -> dict:
    idx: dict = {}
    for z in points:
        idx.setdefault(a.apply(n, z), []).append(z)
    return idx


def check_coherence(omega: Cocycle, depth: int = 4, bound=3, max_witnesses: int = 5,
                    stop_on_fail: bool = False) -> Report:
    """``omega(m,x) W_n(C^m_x & C^n_z) = omega(n,x) W_m(C^n_x & C^m_z)``.

    ``x`` and ``z`` range over the sample set.  For fixed ``x, m, n`` both
    sides vanish unless ``theta_n(z)`` lies in ``theta_n(C^m_x)`` or
    ``theta_m(z)`` lies in ``theta_m(C^n_x)``, so only those ``z`` are
    evaluated; the rest are counted as checked.
    """
    a = omega.action
    rep = Report("coherence",
                 ref="omega(m,x) W_n(C^m_x & C^n_z) = omega(n,x) W_m(C^n_x & C^m_z)")
    pts = a.samples(depth)
    box = _box(a, bound)
    with timed(rep):
        index = {n: _image_index(a, n, pts) for n in box}
        for x in pts:
            for i, m in enumerate(box):
                cm = a.fiber_class(m, x)
                wm = omega(m, x)
                for n in box[i + 1:]:
                    cn = a.fiber_class(n, x)
                    wn = omega(n, x)
                    # C^m_x bucketed by theta_n, C^n_x bucketed by theta_m
                    left: dict = {}
                    for y in cm:
                        k = a.apply(n, y)
                        left[k] = left.get(k, 0) + omega(n, y)
                    right: dict = {}
                    for y in cn:
                        k = a.apply(m, y)
                        right[k] = right.get(k, 0) + omega(m, y)
                    cands = {}
                    for k in left:
                        for z in index[n].get(k, ()):
                            cands[z] = None
                    for k in right:
                        for z in index[m].get(k, ()):
                            cands[z] = None
                    rep.samples += len(pts)
                    for z in cands:
                        lhs = wm * left.get(a.apply(n, z), 0)
                        rhs = wn * right.get(a.apply(m, z), 0)
                        if lhs != rhs:
                            if len(rep.witnesses) < max_witnesses:
                                rep.fail({"m": m, "n": n, "x": x, "z": z,
                                          "lhs": lhs, "rhs": rhs})
                            else:
                                rep.status = "fail"
                            if stop_on_fail:
                                return rep
    return rep


def box_mini_squares(action: Action, bound) -> list[MiniSquare]:
    """Distinct mini-squares generated by pairs from the box, trivial ones included."""
    box = _box(action, bound)
    seen: dict = {}
    for m in box:
        for n in box:
            ms = mini_square_from_pair(m, n)
            seen[(ms.s, ms.t)] = ms
    return list(seen.values())


def check_admissible_cocycle(omega: Cocycle, depth: int = 4, bound=3,
                             mini_squares: Sequence[MiniSquare] | None = None,
                             require: bool = True) -> Report:
    """Evaluate the three admissibility statements on every sampled instance.

    (i)   omega(s v t, z) = omega(u, theta_s z) omega(v, theta_t z)
    (ii)  omega(t, z) = omega(u, theta_s z)
    (iii) omega(s v t, z) = omega(s, z) omega(t, z)

    The implication pattern (ii) => (i), (ii) => (iii) is asserted on every
    instance, and the converses too when omega does not vanish there.  With
    ``require`` the report also fails when any statement is false.
    """
    a = omega.action
    rep = Report("admissible_cocycle", ref="(i) <= (ii) => (iii) on mini-squares")
    squares = list(mini_squares) if mini_squares is not None else box_mini_squares(a, bound)
    counts = {"i": 0, "ii": 0, "iii": 0}
    vanishing = 0
    with timed(rep):
        for ms in squares:
            bad = ms.violations()
            if bad:
                rep.fail({"mini_square": str(ms), "violations": bad})
                continue
            s, t, u, v = ms.s, ms.t, ms.u, ms.v
            j = s | t
            for z in a.samples(depth):
                rep.samples += 1
                zs, zt = a.apply(s, z), a.apply(t, z)
                wj = omega(j, z)
                w_us = omega(u, zs)
                st = {
                    "i": wj == w_us * omega(v, zt),
                    "ii": omega(t, z) == w_us,
                    "iii": wj == omega(s, z) * omega(t, z),
                }
                for k, ok in st.items():
                    counts[k] += ok
                values = (wj, w_us, omega(v, zt), omega(s, z), omega(t, z))
                nonvanishing = all(w != 0 for w in values)
                vanishing += not nonvanishing
                pattern = (not st["ii"] or (st["i"] and st["iii"]))
                if nonvanishing:
                    pattern = pattern and st["i"] == st["ii"] == st["iii"]
                if not pattern:
                    rep.fail({"mini_square": str(ms), "z": z, "statements": st,
                              "reason": "implication pattern"})
                elif require and not all(st.values()):
                    rep.fail({"mini_square": str(ms), "z": z, "statements": st})
    rep.details = {"mini_squares": len(squares), "holds": counts, "vanishing_instances": vanishing}
    return rep


def check_cross_invariance(omega_s: Cocycle, other: Endo, depth: int = 4, bound: int = 3) -> Report:
    """``omega_S(n, x) = omega_S(n, T(x))`` for a star-commuting partner ``T``."""
    a = omega_s.action
    rep = Report("cross_invariance", ref="omega_S(n,x) = omega_S(n,T(x))")
    with timed(rep):
        for x in a.samples(depth):
            tx = other.apply(x)
            for n in _box(a, bound):
                rep.samples += 1
                if omega_s(n, x) != omega_s(n, tx):
                    rep.fail({"n": n, "x": x})
    return rep


def relation_witness(action: Action, m, n, depth: int = 4):
    """Find ``(x, z)`` in exactly one of ``R_m o R_n`` and ``R_n o R_m``.

    ``(x, z)`` is in ``R_m o R_n`` when some ``y`` has
    ``theta_m(y) = theta_m(x)`` and ``theta_n(y) = theta_n(z)``.
    Returns ``(x, z, in_mn, in_nm)`` or None; also the number of pairs examined.
    """
    m, n = action.elem(m), action.elem(n)
    pts = action.samples(depth)
    idx_n = _image_index(action, n, pts)
    idx_m = _image_index(action, m, pts)
    for x in pts:
        reach_n = {action.apply(n, y) for y in action.fiber_class(m, x)}
        reach_m = {action.apply(m, y) for y in action.fiber_class(n, x)}
        cands = {}
        for k in reach_n:
            for z in idx_n.get(k, ()):
                cands[z] = None
        for k in reach_m:
            for z in idx_m.get(k, ()):
                cands[z] = None
        for z in cands:
            in_mn = action.apply(n, z) in reach_n
            in_nm = action.apply(m, z) in reach_m
            if in_mn != in_nm:
                return (x, z, in_mn, in_nm), len(pts) ** 2
    return None, len(pts) ** 2


def check_relation_commutation_implication(cocycles: Sequence[Cocycle], action: Action,
                                           depth: int = 4, bound: int = 1) -> Report:
    """Non-commuting relations rule out never-vanishing coherent cocycles.

    Looks for a relation non-commutation witness among generator pairs in
    the box.  If one exists, every supplied cocycle that is positive on the
    samples must fail coherence; a coherent one is a violation.
    """
    rep = Report("relation_commutation_implication",
                 ref="coherent never-vanishing cocycle => R_m, R_n commute")
    box = [b for b in _box(action, bound) if not b.is_identity()]
    with timed(rep):
        witness = None
        for i, m in enumerate(box):
            for n in box[i + 1:]:
                w, count = relation_witness(action, m, n, depth)
                rep.samples += count
                if w is not None:
                    witness = {"m": m, "n": n, "x": w[0], "z": w[1],
                               "in_R_m_R_n": w[2], "in_R_n_R_m": w[3]}
                    break
            if witness:
                break
        rep.details["relations_commute"] = witness is None
        rep.details["relation_witness"] = witness
        results = []
        if witness is not None:
            for om in cocycles:
                positive = all(om(n, x) > 0 for x in action.samples(depth) for n in box)
                coh = check_coherence(om, depth, bound, max_witnesses=1, stop_on_fail=True)
                results.append({"cocycle": om.name, "positive": positive,
                                "coherent": coh.passed,
                                "coherence_witness": coh.witnesses[0] if coh.witnesses else None})
                if positive and coh.passed:
                    rep.fail({"cocycle": om.name, "relation_witness": witness})
        rep.details["cocycles"] = results
    return rep


def build_iterate_cocycle(e: Endo, action: EndoAction | None = None) -> Cocycle:
    """``omega(1,x) = 1/|C^1_x|`` extended by ``omega(k+1,x) = omega(k,x) omega(1,E^k x)``."""
    action = action or EndoAction([e], name=str(e))
    group = action.group

    def fn(n, x) -> Fraction:
        k = n[0]
        if k == 0:
            return Fraction(1)
        prev = omega(group((k - 1,)), x)
        y = action.apply(group((k - 1,)), x)
        return prev / len(e.preimages(e.apply(y)))

    omega = Cocycle(action, fn, name=f"iterate[{e}]", positive=True)
    return omega


def build_product_cocycle(s: Endo, t: Endo, check: bool = True, depth: int = 4,
                          action: EndoAction | None = None) -> Cocycle:
    """``omega((a,b),x) = omega_S(a,x) omega_T(b,x)`` for a star-commuting pair."""
    if check:
        ok, witness, _ = check_star_commuting(s, t, depth)
        if not ok:
            raise StarCommutationError(f"({s}, {t}) do not star-commute: {witness}")
    action = action or EndoAction([s, t])
    ws, wt = build_iterate_cocycle(s), build_iterate_cocycle(t)
    g1 = ws.action.group

    def fn(n, x) -> Fraction:
        return ws(g1((n[0],)), x) * wt(g1((n[1],)), x)

    return Cocycle(action, fn, name=f"product[{s},{t}]", positive=True)


def circle_cocycle(action: CircleAction | None = None) -> Cocycle:
    action = action or CircleAction()
    return Cocycle(action, lambda n, x: 1 / n.to_fraction(), name="1/n", positive=True)
