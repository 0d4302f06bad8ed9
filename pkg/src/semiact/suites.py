"""Named verification suites.

A suite is an ordered plan of ``(name, thunk)`` items, each returning a
Report.  Plans are rebuilt from a picklable config so items can run in
worker processes and be merged back in plan order.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Callable

from . import convolution as conv
from .cocycle import (
    Cocycle,
    build_iterate_cocycle,
    build_product_cocycle,
    check_admissible_cocycle,
    check_coherence,
    check_cocycle_identity,
    check_cross_invariance,
    check_normalized,
    check_relation_commutation_implication,
    circle_cocycle,
    relation_witness,
)
from .dynamics import (
    COUNTEREXAMPLE_DICT,
    LEDRAPPIER_DICT,
    CellularAutomaton,
    Dictionary,
    EndoAction,
    Shift,
    all_progressive_dictionaries,
    ca_apply,
    ca_preimages,
    check_ledrappier_conjugacy,
    check_progressive,
    check_star_commuting,
    circle_system,
    relation_candidates,
    relation_compose_member,
    shift_system,
)
from .groupoid import (
    check_admissible_action,
    check_groupoid_axioms,
    check_poly_groupoid,
    check_preimage_intersection,
    class_product_bijection,
)
from .lattice import (
    LatticeError,
    complete_mini_square,
    decompose,
    int_vector,
    mini_square_from_pair,
    positive_rationals,
)
from .operators import (
    check_E_commutation,
    check_interaction_axioms,
    check_interaction_well_defined,
    check_left_inverse,
    check_poly_W,
    check_transfer_antimult,
    check_transfer_axiom,
)
from .report import Report, timed
from .scalar import Scalar
from .space import Word, parse_point, sample_points

__all__ = [
    "SUITES",
    "RunConfig",
    "ConfigError",
    "plan",
    "run_item",
    "search_dictionaries",
    "perturbed_cocycle",
    "ca_preimage_targets",
    "check_counterexample_relations",
]

SUITES = ("scalar", "lattice", "cocycle", "operators", "groupoid", "convolution",
          "ledrappier", "circle", "counterexample")

MAX_SEARCH_WIDTH = 5


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    """``depth`` and ``box`` of None select the per-suite default."""

    suite: str
    depth: int | None = None
    box: int | None = None
    dictionary: Dictionary | None = None
    jobs: int = 1

    def __post_init__(self):
        if self.suite not in SUITES:
            raise ConfigError(f"unknown suite {self.suite!r}; choose from {', '.join(SUITES)}")
        if self.depth is not None and self.depth < 1:
            raise ConfigError("depth must be >= 1")
        if self.box is not None and self.box < 1:
            raise ConfigError("box must be >= 1")
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")
        if self.dictionary is not None:
            ok, beta = check_progressive(self.dictionary)
            if not ok:
                raise ConfigError(f"dictionary {self.dictionary} is not progressive at {beta!r}")

    def resolved(self) -> "RunConfig":
        d, b = DEFAULTS[self.suite]
        return replace(self, depth=self.depth or d, box=self.box or b)

    def to_dict(self) -> dict:
        r = self.resolved()
        return {"suite": r.suite, "depth": r.depth, "box": r.box,
                "dict": None if r.dictionary is None else str(r.dictionary), "jobs": r.jobs}


# (depth, box); the circle reads depth as the number of sample angles
DEFAULTS = {
    "scalar": (4, 3),
    "lattice": (4, 3),
    "cocycle": (4, 3),
    "operators": (4, 2),
    "groupoid": (3, 2),
    "convolution": (3, 2),
    "ledrappier": (4, 3),
    "circle": (50, 6),
    "counterexample": (4, 1),
}

Plan = list[tuple[str, Callable[[], Report]]]


def _two_map_system(cfg: RunConfig, default: Dictionary) -> EndoAction:
    d = cfg.dictionary or default
    return EndoAction([Shift(), CellularAutomaton(d)], name=f"shift+T{d}")


def _product(action: EndoAction, depth: int) -> Cocycle:
    return build_product_cocycle(*action.endos, check=False, depth=depth, action=action)


def perturbed_cocycle(omega: Cocycle, word: str = "1", factor=Fraction(3, 2)) -> Cocycle:
    """``omega`` with ``omega(n, .)`` rescaled on the cylinder ``[word]`` for every ``n != 1``."""
    def fn(n, x):
        w = omega(n, x)
        if not n.is_identity() and x.first(len(word)) == word:
            return w * factor
        return w
    return Cocycle(omega.action, fn, name=f"{omega.name}~[{word}]", locality=omega.locality)


# scalar


def _scalar_samples() -> list[Scalar]:
    rs = [Scalar(0), Scalar(1), Scalar(Fraction(-2, 3)), Scalar.sqrt(2), Scalar.sqrt(3),
          Scalar.sqrt(8) - 1, Scalar(Fraction(1, 2)) + Scalar.sqrt(6), Scalar.sqrt(5) * Scalar(-3)]
    return rs


def check_scalar_field() -> Report:
    rep = Report("scalar_ring_laws", ref="exact arithmetic in Q(sqrt r)")
    xs = _scalar_samples()
    with timed(rep):
        for a, b, c in itertools.product(xs, repeat=3):
            rep.samples += 1
            if (a + b) + c != a + (b + c) or (a * b) * c != a * (b * c):
                rep.fail({"law": "associative", "a": a, "b": b, "c": c})
            if a * (b + c) != a * b + a * c:
                rep.fail({"law": "distributive", "a": a, "b": b, "c": c})
            if a + b != b + a or a * b != b * a:
                rep.fail({"law": "commutative", "a": a, "b": b})
    return rep


def check_scalar_roots() -> Report:
    rep = Report("scalar_roots", ref="sqrt(q)^2 = q, normalized radicands")
    with timed(rep):
        for p in range(0, 40):
            for q in (1, 2, 3, 5, 12):
                rep.samples += 1
                f = Fraction(p, q)
                r = conv.sqrt_fraction(f)
                if r * r != Scalar(f):
                    rep.fail({"q": f, "root": r})
                if r.sign() < 0:
                    rep.fail({"q": f, "negative root": r})
    return rep


def check_scalar_order() -> Report:
    rep = Report("scalar_order", ref="exact sign agrees with float on separated values")
    xs = _scalar_samples()
    with timed(rep):
        for a, b in itertools.product(xs, repeat=2):
            rep.samples += 1
            d = a - b
            if abs(float(d)) > 1e-9 and (d.sign() > 0) != (float(d) > 0):
                rep.fail({"a": a, "b": b})
            if Scalar.parse(str(a)) != a:
                rep.fail({"roundtrip": str(a)})
    return rep


# lattice


def _z2_grid(lo: int, hi: int):
    g = int_vector(2)
    return [g(v) for v in itertools.product(range(lo, hi + 1), repeat=2)]


def _q_grid(top: int):
    g = positive_rationals()
    return [g(k) for k in range(1, top + 1)]


def check_lattice_grid(kind: str, top: int = 30, span: int = 3) -> Report:
    """Mini-square invariants, ``s join t = su = tv`` and completion uniqueness."""
    rep = Report(f"lattice_grid_{kind}", ref="s v t = su = tv; completion unique")
    if kind == "Z2":
        grid = _z2_grid(-span, span)
        pos = [x for x in grid if x.in_p()]
    else:
        pos = _q_grid(top)
        grid = pos
    pos_set = set(pos)
    completions = 0
    with timed(rep):
        for m in grid:
            for n in grid:
                if not (m.in_p() and n.in_p()):
                    continue
                rep.samples += 1
                ms = mini_square_from_pair(m, n)
                if not ms.is_valid():
                    rep.fail({"m": m, "n": n, "violations": ms.violations()})
                hi = ms.s | ms.t
                if not (hi == ms.s * ms.u == ms.t * ms.v):
                    rep.fail({"m": m, "n": n, "law": "s v t = su = tv"})
        for s in pos:
            for t in pos:
                if not (s & t).is_identity():
                    try:
                        complete_mini_square(s, t)
                        rep.fail({"s": s, "t": t, "law": "completion must reject s meet t != 1"})
                    except LatticeError:
                        pass
                    continue
                completions += 1
                u0, v0 = complete_mini_square(s, t)
                index: dict = {}
                for v in pos:
                    index.setdefault(t * v, []).append(v)
                found = [(u, v) for u in pos for v in index.get(s * u, ())
                         if (u.inv() | v.inv()).is_identity()]
                if (u0 in pos_set and v0 in pos_set) and found != [(u0, v0)]:
                    rep.fail({"s": s, "t": t, "completion": (u0, v0), "brute": found})
        rep.details = {"completions": completions}
    return rep


def check_decompose(kind: str, top: int = 30, span: int = 3) -> Report:
    rep = Report(f"decompose_{kind}", ref="x = y n = p m^-1")
    if kind == "Z2":
        gs = _z2_grid(-span, span)
    else:
        q = positive_rationals()
        gs = [q(Fraction(a, b)) for a in range(1, top + 1) for b in range(1, top + 1)]
    with timed(rep):
        for x in dict.fromkeys(gs):
            rep.samples += 1
            (y, n), (p, m) = decompose(x)
            one = x.group.identity
            if y * n != x or p * m.inv() != x or not (n.in_p() and m.in_p()):
                rep.fail({"x": x})
            if not (y <= one and one <= p):
                rep.fail({"x": x, "law": "y <= 1 <= p"})
    return rep


# dynamics


def ca_preimage_targets(count: int = 20) -> list[Word]:
    """Deterministic eventually periodic targets: short prefixes over short cycles."""
    out: dict = {}
    for k in range(0, 4):
        for c in ("0", "1", "01", "001", "011"):
            for pre in itertools.product("01", repeat=k):
                out[Word("".join(pre), c)] = None
                if len(out) == count:
                    return list(out)
    return list(out)


def check_ca_preimages(width: int = 3, count: int = 20) -> Report:
    rep = Report("ca_preimages", ref="|T^-1(y)| = 2^(p-1) for progressive T")
    targets = ca_preimage_targets(count)
    with timed(rep):
        for d in all_progressive_dictionaries(width):
            for y in targets:
                rep.samples += 1
                pre = ca_preimages(d, y)
                if len(set(pre)) != 1 << (width - 1):
                    rep.fail({"dict": str(d), "y": y, "count": len(set(pre))})
                for x in pre:
                    if ca_apply(d, x) != y:
                        rep.fail({"dict": str(d), "y": y, "x": x, "image": ca_apply(d, x)})
        rep.details = {"dictionaries": len(all_progressive_dictionaries(width)), "targets": len(targets)}
    return rep


def check_counterexample_relations(d: Dictionary = COUNTEREXAMPLE_DICT) -> Report:
    """``(0|1, |0)`` lies in ``R_S o R_T`` via ``|1`` but not in ``R_T o R_S``."""
    rep = Report("counterexample_relations", ref="(x,z) in R_S o R_T minus R_T o R_S")
    S, T = Shift(), CellularAutomaton(d)
    x, z = parse_point("0|1"), parse_point("|0")
    with timed(rep):
        st, y = relation_compose_member(S, T, x, z)
        ts, _ = relation_compose_member(T, S, x, z)
        cands = relation_candidates(T, S, x, z)
        rep.samples = len(cands) + 1
        rep.details = {"x": x, "z": z, "R_S_R_T": st, "via": y, "R_T_R_S": ts,
                       "rejected": [c for c, ok in cands if not ok]}
        if not st or y != parse_point("|1"):
            rep.fail({"expected": "(0|1, |0) in R_S o R_T via |1", "via": y})
        if ts or any(ok for _, ok in cands):
            rep.fail({"expected": "(0|1, |0) not in R_T o R_S", "candidates": cands})
    return rep


def _expect_failure(name: str, ref: str, inner: Report) -> Report:
    """Pass when ``inner`` fails with a witness."""
    rep = Report(name, ref=ref, samples=inner.samples, elapsed=inner.elapsed,
                 details={"inner_check": inner.check, "inner_status": inner.status,
                          "witness": inner.witnesses[0] if inner.witnesses else None})
    if inner.passed or not inner.witnesses:
        rep.fail({"expected failure of": inner.check})
    return rep


def check_star_commuting_report(s, t, depth: int, expect: bool = True) -> Report:
    rep = Report("star_commuting" if expect else "star_commuting_fails",
                 ref="T(x) = S(y) => unique z: S z = x, T z = y")
    with timed(rep):
        ok, witness, pairs = check_star_commuting(s, t, depth)
        rep.samples = pairs
        rep.details = {"star_commuting": ok, "witness": witness}
        if ok != expect:
            rep.fail({"star_commuting": ok, "witness": witness})
    return rep


def check_conjugacy_report(depth: int) -> Report:
    rep = Report("ledrappier_conjugacy", ref="first-row map intertwines the Ledrappier shifts")
    with timed(rep):
        ok, witness, count = check_ledrappier_conjugacy(sample_points(depth), depth)
        rep.samples = count
        if not ok:
            rep.fail(witness)
    return rep


def search_dictionaries(width: int, depth: int = 4) -> Report:
    """Relation and star commutation of ``(S, T_D)`` for every progressive ``D`` of width ``width``."""
    if not 1 <= width <= MAX_SEARCH_WIDTH:
        raise ConfigError(f"width must be in 1..{MAX_SEARCH_WIDTH}")
    rep = Report("search_dictionaries", ref="progressive dictionaries; relation and star commutation")
    rows = []
    with timed(rep):
        for d in all_progressive_dictionaries(width):
            a = EndoAction([Shift(), CellularAutomaton(d)], name=str(d), check_depth=min(depth, 3))
            rel, _ = relation_witness(a, (1, 0), (0, 1), depth)
            star, sw, _ = check_star_commuting(Shift(), CellularAutomaton(d), depth)
            rows.append({"dict": str(d), "relations_commute": rel is None,
                         "relation_witness": None if rel is None else
                         {"x": rel[0], "z": rel[1], "in_R_S_R_T": rel[2], "in_R_T_R_S": rel[3]},
                         "star_commuting": star, "star_witness": sw})
            rep.samples += 1
        rep.details = {"width": width, "depth": depth, "count": len(rows), "dictionaries": rows}
    return rep


# plans


def _cocycle_items(name: str, omega: Cocycle, depth: int, bound: int) -> Plan:
    return [
        (f"{name}:normalized", lambda: check_normalized(omega, depth, bound)),
        (f"{name}:cocycle_identity", lambda: check_cocycle_identity(omega, depth, bound)),
        (f"{name}:admissible_cocycle", lambda: check_admissible_cocycle(omega, depth, bound)),
        (f"{name}:coherence", lambda: check_coherence(omega, depth, bound)),
    ]


def _plan_scalar(cfg: RunConfig) -> Plan:
    return [("ring_laws", check_scalar_field), ("roots", check_scalar_roots), ("order", check_scalar_order)]


def _plan_lattice(cfg: RunConfig) -> Plan:
    return [
        ("grid_Z2", lambda: check_lattice_grid("Z2")),
        ("grid_Q+", lambda: check_lattice_grid("Q+")),
        ("decompose_Z2", lambda: check_decompose("Z2")),
        ("decompose_Q+", lambda: check_decompose("Q+")),
    ]


def _plan_cocycle(cfg: RunConfig) -> Plan:
    depth, bound = cfg.depth, cfg.box
    plan: Plan = []
    if cfg.dictionary is None:
        shift = shift_system()
        plan += _cocycle_items("shift", build_iterate_cocycle(Shift(), shift), depth, bound)
    a = _two_map_system(cfg, LEDRAPPIER_DICT)
    plan += _cocycle_items(a.name, _product(a, depth), depth, bound)
    return plan


def _plan_operators(cfg: RunConfig) -> Plan:
    depth, bound = cfg.depth, cfg.box
    plan: Plan = []
    systems = []
    if cfg.dictionary is None:
        systems.append(("shift", build_iterate_cocycle(Shift(), shift_system())))
    a = _two_map_system(cfg, LEDRAPPIER_DICT)
    systems.append((a.name, _product(a, depth)))
    for name, om in systems:
        plan += [
            (f"{name}:transfer_axiom", lambda om=om: check_transfer_axiom(om, depth, bound)),
            (f"{name}:transfer_antimult", lambda om=om: check_transfer_antimult(om, depth, bound)),
            (f"{name}:left_inverse", lambda om=om: check_left_inverse(om, depth, bound)),
            (f"{name}:interaction_well_defined", lambda om=om: check_interaction_well_defined(om, depth, bound)),
            (f"{name}:interaction_axioms", lambda om=om: check_interaction_axioms(om, depth, bound)),
        ]
        if om.action.group.dim == 2:
            plan += [
                (f"{name}:E_commutation", lambda om=om: check_E_commutation(om, (1, 0), (0, 1), depth)),
                (f"{name}:poly_W", lambda om=om: check_poly_W(om, depth, bound)),
            ]
    return plan


def _plan_groupoid(cfg: RunConfig) -> Plan:
    depth, bound = cfg.depth, cfg.box
    a = _two_map_system(cfg, LEDRAPPIER_DICT)
    g = a.group
    ms = mini_square_from_pair(g((1, 0)), g((0, 1)))
    return [
        ("groupoid_axioms", lambda: check_groupoid_axioms(a, depth, 1, 200)),
        ("admissible_action", lambda: check_admissible_action(a, depth, bound)),
        ("preimage_intersection", lambda: check_preimage_intersection(a, depth, 1)),
        ("class_product_bijection", lambda: class_product_bijection(a, ms, parse_point("|0"))),
        ("poly_groupoid", lambda: check_poly_groupoid(a, depth, bound, 200)),
    ]


def _plan_convolution(cfg: RunConfig) -> Plan:
    depth, bound = cfg.depth, cfg.box
    a = _two_map_system(cfg, LEDRAPPIER_DICT)
    om = _product(a, depth)
    return [
        ("isometry", lambda: conv.check_isometry(om, depth, bound)),
        ("semigroup", lambda: conv.check_semigroup(om, depth, bound)),
        ("SS_star_formula", lambda: conv.check_SS_star_formula(om, depth, bound)),
        ("projection_commutation", lambda: conv.check_projection_commutation(om, depth, bound)),
        ("partial_representation", lambda: conv.check_partial_representation(om, depth, bound)),
        ("covariance", lambda: conv.check_covariance(om, depth, bound)),
        ("partition_of_unity", lambda: conv.partition_of_unity(om, (1, 1), depth)),
        ("adjoint_laws", lambda: conv.check_adjoint_laws(om, min(depth, 2), 1)),
    ]


def _plan_ledrappier(cfg: RunConfig) -> Plan:
    depth, bound = cfg.depth, cfg.box
    a = _two_map_system(cfg, LEDRAPPIER_DICT)
    s, t = a.endos
    om = _product(a, depth)
    return [
        ("star_commuting", lambda: check_star_commuting_report(s, t, depth)),
        ("conjugacy", lambda: check_conjugacy_report(depth)),
        ("cross_invariance", lambda: check_cross_invariance(build_iterate_cocycle(s), t, depth, bound)),
        *_cocycle_items("product", om, depth, bound),
        ("admissible_action", lambda: check_admissible_action(a, depth, bound)),
    ]


def _plan_circle(cfg: RunConfig) -> Plan:
    count, bound = cfg.depth, cfg.box
    a = circle_system()
    om = circle_cocycle(a)
    g = a.group
    squares = [mini_square_from_pair(g(n), g(m)) for n, m in ((2, 3), (3, 5), (4, 9))]
    return [
        *_cocycle_items("circle", om, count, bound),
        ("admissible_action", lambda: check_admissible_action(a, count, bound, squares)),
        ("transfer_axiom", lambda: check_transfer_axiom(om, count, min(bound, 3))),
        ("left_inverse", lambda: check_left_inverse(om, count, min(bound, 3))),
        ("interaction_axioms", lambda: check_interaction_axioms(om, min(count, 12), 2)),
        ("projection_commutation", lambda: conv.check_projection_commutation(om, min(count, 12), 3)),
    ]


def _plan_counterexample(cfg: RunConfig) -> Plan:
    depth, bound = cfg.depth, cfg.box
    d = cfg.dictionary or COUNTEREXAMPLE_DICT
    a = _two_map_system(cfg, COUNTEREXAMPLE_DICT)
    s, t = a.endos
    om = _product(a, depth)
    plan: Plan = []
    if cfg.dictionary is None:
        plan.append(("relations", lambda: check_counterexample_relations(d)))
    plan += [
        ("star_commuting_fails", lambda: check_star_commuting_report(s, t, depth, expect=False)),
        ("product_not_coherent", lambda: _expect_failure(
            "product_not_coherent", "no never-vanishing coherent cocycle",
            check_coherence(om, depth, max(bound, 1), max_witnesses=1, stop_on_fail=True))),
        ("relation_implication", lambda: check_relation_commutation_implication([om], a, depth, bound)),
    ]
    return plan


_PLANS = {
    "scalar": _plan_scalar,
    "lattice": _plan_lattice,
    "cocycle": _plan_cocycle,
    "operators": _plan_operators,
    "groupoid": _plan_groupoid,
    "convolution": _plan_convolution,
    "ledrappier": _plan_ledrappier,
    "circle": _plan_circle,
    "counterexample": _plan_counterexample,
}


def plan(cfg: RunConfig) -> Plan:
    return _PLANS[cfg.suite](cfg.resolved())


def run_item(cfg: RunConfig, index: int) -> tuple[str, Report]:
    name, thunk = plan(cfg)[index]
    rep = thunk()
    return name, rep
