"""Command line entry point: ``verify``, ``search-dictionaries`` and ``eval``."""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor

from .cocycle import build_iterate_cocycle, build_product_cocycle, circle_cocycle
from .dynamics import (
    LEDRAPPIER_DICT,
    CellularAutomaton,
    DictionaryError,
    EndoAction,
    Shift,
    circle_system,
    load_dictionary,
    shift_system,
)
from .lattice import LatticeError
from .operators import eval_expr, parse_expr
from .report import jsonable
from .space import parse_point
from .suites import SUITES, ConfigError, RunConfig, plan, run_item, search_dictionaries

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="semiact", description="Exact verification of semigroup-action identities.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("suite", choices=SUITES)
    v.add_argument("--depth", type=int, default=None, help="sample depth (suite default if omitted)")
    v.add_argument("--box", type=int, default=None, help="generator box bound (suite default if omitted)")
    v.add_argument("--dict", dest="dict_path", default=None, help="dictionary file for the second map")
    v.add_argument("--format", choices=("text", "json"), default="text")
    v.add_argument("--jobs", type=int, default=1)
    v.add_argument("--timing", action="store_true", help="include elapsed times in the report")

    s = sub.add_parser("search-dictionaries", help="enumerate progressive dictionaries")
    s.add_argument("--width", type=int, default=3)
    s.add_argument("--depth", type=int, default=4)
    s.add_argument("--format", choices=("text", "json"), default="text")
    s.add_argument("--timing", action="store_true")

    e = sub.add_parser("eval", help="evaluate an operator expression at a point")
    e.add_argument("expr")
    e.add_argument("--at", required=True, help="point, e.g. 0|1 or 1/3")
    e.add_argument("--system", choices=("shift", "ledrappier", "circle"), default=None)
    e.add_argument("--dict", dest="dict_path", default=None)
    return p


def _load(path):
    if path is None:
        return None
    try:
        return load_dictionary(path)
    except (OSError, DictionaryError) as exc:
        raise UsageError(f"cannot read dictionary {path}: {exc}") from exc


def run_suite(cfg: RunConfig) -> tuple[int, dict]:
    t0 = time.perf_counter()
    items = plan(cfg)
    if cfg.jobs > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(run_item, [cfg] * len(items), range(len(items))))
    else:
        results = [(name, thunk()) for name, thunk in items]
    checks = []
    for name, rep in results:
        c = {"name": name, "paper_ref": rep.ref, "status": rep.status, "samples": rep.samples}
        if rep.witnesses:
            c["witness"] = jsonable(rep.witnesses[0])
        if rep.details:
            c["details"] = jsonable(rep.details)
        c["_elapsed_ms"] = round(rep.elapsed * 1000)
        checks.append(c)
    ok = all(c["status"] == "pass" for c in checks)
    report = {"suite": cfg.suite, "config": cfg.to_dict(), "checks": checks,
              "_elapsed_ms": round((time.perf_counter() - t0) * 1000)}
    return (EXIT_OK if ok else EXIT_VIOLATION), report


def _strip_timing(report: dict, timing: bool) -> dict:
    out = {k: v for k, v in report.items() if k != "_elapsed_ms"}
    if timing:
        out["elapsed_ms"] = report["_elapsed_ms"]
    out["checks"] = []
    for c in report["checks"]:
        c2 = {k: v for k, v in c.items() if k != "_elapsed_ms"}
        if timing:
            c2["elapsed_ms"] = c["_elapsed_ms"]
        out["checks"].append(c2)
    return out


def format_text(report: dict) -> str:
    lines = [f"suite {report['suite']}  " + " ".join(f"{k}={v}" for k, v in report["config"].items())]
    for c in report["checks"]:
        line = f"{c['status'].upper():4}  {c['name']}  ({c['samples']} samples)"
        if "elapsed_ms" in c:
            line += f"  {c['elapsed_ms']} ms"
        lines.append(line)
        if "witness" in c:
            lines.append(f"      witness: {json.dumps(c['witness'], sort_keys=True)}")
        elif "details" in c:
            d = json.dumps(c["details"], sort_keys=True)
            if len(d) <= 240:
                lines.append(f"      details: {d}")
    passed = sum(c["status"] == "pass" for c in report["checks"])
    tail = f"{passed}/{len(report['checks'])} checks passed"
    if "elapsed_ms" in report:
        tail += f" in {report['elapsed_ms']} ms"
    lines.append(tail)
    return "\n".join(lines)


def _cmd_verify(args) -> int:
    cfg = RunConfig(args.suite, args.depth, args.box, _load(args.dict_path), args.jobs)
    code, report = run_suite(cfg)
    report = _strip_timing(report, args.timing)
    if args.format == "json":
        print(json.dumps(report, indent=2, sort_keys=True))
    else:
        print(format_text(report))
    return code


def _cmd_search(args) -> int:
    rep = search_dictionaries(args.width, args.depth)
    rows = rep.details["dictionaries"]
    if args.format == "json":
        out = {"width": args.width, "depth": args.depth, "count": len(rows), "dictionaries": jsonable(rows)}
        if args.timing:
            out["elapsed_ms"] = round(rep.elapsed * 1000)
        print(json.dumps(out, indent=2, sort_keys=True))
        return EXIT_OK
    print(f"width {args.width}: {len(rows)} progressive dictionaries (depth {args.depth})")
    for r in rows:
        rel = "commute" if r["relations_commute"] else "NON-COMMUTING"
        star = "star-commuting" if r["star_commuting"] else "not star-commuting"
        line = f"  {r['dict']:<40} relations {rel:<14} {star}"
        if r["relation_witness"]:
            w = r["relation_witness"]
            line += f"  witness (x={w['x']}, z={w['z']})"
        print(line)
    if args.timing:
        print(f"{round(rep.elapsed * 1000)} ms")
    return EXIT_OK


def _eval_system(args):
    d = _load(args.dict_path)
    name = args.system or ("circle" if "|" not in args.at else "ledrappier" if d or "," in args.expr else "shift")
    if name == "circle":
        a = circle_system()
        return a, circle_cocycle(a)
    if name == "shift" and d is None:
        a = shift_system()
        return a, build_iterate_cocycle(Shift(), a)
    a = EndoAction([Shift(), CellularAutomaton(d or LEDRAPPIER_DICT)])
    return a, build_product_cocycle(*a.endos, check=False, action=a)


def _cmd_eval(args) -> int:
    action, omega = _eval_system(args)
    try:
        e = parse_expr(args.expr, action)
        x = parse_point(args.at)
    except (ValueError, LatticeError) as exc:
        raise UsageError(str(exc)) from exc
    print(eval_expr(e, omega, x))
    return EXIT_OK


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.command == "verify":
            return _cmd_verify(args)
        if args.command == "search-dictionaries":
            return _cmd_search(args)
        return _cmd_eval(args)
    except (UsageError, ConfigError, DictionaryError) as exc:
        print(f"semiact: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
