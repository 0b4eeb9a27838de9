"""Command-line front end: ``qwk validate|check|report|series``.

Exit codes: 0 pass, 1 mathematical failure, 2 usage, parse or I/O error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from . import __version__
from .algebra_file import AlgebraFile, load, parse_algebra, to_document
from .checks import CORE_IDS, REGISTRY, resolve_params, run_check
from .errors import QwkError
from .exact_core import format_rational, series_of
from .lie import validate

EXIT_PASS, EXIT_FAIL, EXIT_ERROR = 0, 1, 2
SERIES_CHOICES = ("j", "ln_j", "f")


def _jsonable(x):
    if isinstance(x, Fraction):
        return format_rational(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if x is None or isinstance(x, (bool, int, float, str)):
        return x
    return repr(x)


def _load(path) -> AlgebraFile:
    try:
        return load(path)
    except OSError as exc:
        raise QwkError(f"cannot read {path}: {exc.strerror or exc}") from None


def _require_valid(af: AlgebraFile) -> bool:
    rep = validate(af.algebra)
    if not rep.passed:
        print(f"{af.algebra.name}: not a quadratic Lie algebra")
        print(rep.format())
    return rep.passed


def _execute(check_id, doc, overrides) -> dict:
    """Run one check and return its report entry (also used in worker processes)."""
    af = parse_algebra(doc)
    params = resolve_params(check_id, overrides)
    start = time.perf_counter()
    try:
        params, res = run_check(check_id, af.algebra, overrides, af.finite_gda)
        entry = {"status": "pass" if res.passed else "fail", "witness": None if res.passed else _jsonable(res.witness or {})}
        details = _jsonable(res.details)
    except (QwkError, ArithmeticError, ValueError) as exc:
        entry = {"status": "error", "witness": None, "error": f"{type(exc).__name__}: {exc}"}
        details = {}
    ms = (time.perf_counter() - start) * 1000
    out = {"id": check_id, "params": _jsonable(params), **entry, "wall_time_ms": round(ms, 3)}
    out["_details"] = details
    return out


def _summary_line(entry) -> str:
    d = entry.get("_details", {})
    if entry["id"] == "cubic" and "value" in d:
        return f"C^2 = {d['value']}; -(1/48)*f_abc f^abc = -(1/48)*{d['f_squared']} = {d['expected']}"
    if entry["id"] == "dirac" and "D_squared" in d:
        return f"D^2 = {d['D_squared']}"
    if entry["id"] == "cdybe" and "degree0_slice" in d:
        return f"degree-0 slice {d['degree0_slice']}; 2r control fails: {d.get('control_2r_fails')}"
    keep = {k: v for k, v in d.items() if not isinstance(v, (dict, list)) or len(str(v)) < 120}
    return ", ".join(f"{k}={v}" for k, v in keep.items())


def cmd_validate(args) -> int:
    af = _load(args.file)
    rep = validate(af.algebra)
    print(f"{af.algebra.name} (dim {af.algebra.dim})")
    print(rep.format())
    if af.finite_gda is not None:
        from .gda import gda_cartan_check

        res = gda_cartan_check(af.algebra, af.finite_gda)
        print(f"{'finite_gda cartan':20s} {'pass' if res.passed else 'FAIL'}" + ("" if res.passed else f"  witness={res.witness}"))
        if not res.passed:
            return EXIT_FAIL
    return EXIT_PASS if rep.passed else EXIT_FAIL


def cmd_check(args) -> int:
    if args.id not in REGISTRY:
        print(f"unknown check id {args.id!r}; choose from {', '.join(REGISTRY)}", file=sys.stderr)
        return EXIT_ERROR
    af = _load(args.file)
    if not _require_valid(af):
        return EXIT_FAIL
    overrides = {"t_order": args.t_order, "degree": args.degree, "max_degree": args.max_degree}
    entry = _execute(args.id, to_document(af.algebra, af.finite_gda), overrides)
    params = ", ".join(f"{k}={v}" for k, v in entry["params"].items())
    label = f"{args.id} [{params}]" if params else args.id
    print(f"{label}: {entry['status']} ({entry['wall_time_ms']:.0f} ms)")
    line = _summary_line(entry)
    if line:
        print(f"  {line}")
    if entry["status"] == "fail":
        print(f"  witness: {json.dumps(entry['witness'], sort_keys=True)}")
        return EXIT_FAIL
    if entry["status"] == "error":
        print(f"  error: {entry['error']}")
        return EXIT_ERROR
    return EXIT_PASS


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("QWK_THREADS", "1")))
    except ValueError:
        return 1


def build_report(af: AlgebraFile, ids, overrides=None) -> dict:
    doc = to_document(af.algebra, af.finite_gda)
    overrides = overrides or {}
    workers = min(_threads(), len(ids))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            entries = list(pool.map(_execute, ids, [doc] * len(ids), [overrides] * len(ids)))
    else:
        entries = [_execute(i, doc, overrides) for i in ids]
    return {"algebra": af.algebra.name, "tool_version": __version__, "checks": entries}


def _public(report) -> dict:
    return {**report, "checks": [{k: v for k, v in e.items() if not k.startswith("_")} for e in report["checks"]]}


def cmd_report(args) -> int:
    af = _load(args.file)
    valid = _require_valid(af)
    ids = list(REGISTRY) if args.all else list(CORE_IDS)
    report = build_report(af, ids)
    width = max(len(i) for i in ids)
    print(f"report for {af.algebra.name} (qwk {__version__})")
    for e in report["checks"]:
        params = ", ".join(f"{k}={v}" for k, v in e["params"].items())
        print(f"  {e['id']:<{width}}  {e['status']:<5}  {e['wall_time_ms']:>10.1f} ms  {params}")
    if args.json:
        try:
            with open(args.json, "w") as fh:
                json.dump(_public(report), fh, indent=2)
                fh.write("\n")
        except OSError as exc:
            print(f"cannot write {args.json}: {exc}", file=sys.stderr)
            return EXIT_ERROR
    statuses = {e["status"] for e in report["checks"]}
    if not valid:
        return EXIT_FAIL
    if "error" in statuses:
        return EXIT_ERROR
    return EXIT_PASS if statuses <= {"pass"} else EXIT_FAIL


def cmd_series(args) -> int:
    if args.name not in SERIES_CHOICES:
        print(f"unknown series {args.name!r}; choose from {', '.join(SERIES_CHOICES)}", file=sys.stderr)
        return EXIT_ERROR
    if args.order < 0:
        print("--order must be non-negative", file=sys.stderr)
        return EXIT_ERROR
    s = series_of(args.name, args.order)
    for k in range(args.order + 1):
        print(f"{k}: {format_rational(s[k])}")
    return EXIT_PASS


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qwk", description="Exact checks for quadratic Lie algebras, Clifford quantization and Weil algebras.")
    p.add_argument("--version", action="version", version=f"qwk {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", help="check the quadratic Lie algebra axioms")
    v.add_argument("file")
    v.set_defaults(func=cmd_validate)

    c = sub.add_parser("check", help="run one named check")
    c.add_argument("id", help="one of: " + ", ".join(REGISTRY))
    c.add_argument("file")
    c.add_argument("--t-order", type=int, dest="t_order")
    c.add_argument("--degree", type=int)
    c.add_argument("--max-degree", type=int, dest="max_degree")
    c.set_defaults(func=cmd_check)

    r = sub.add_parser("report", help="run the full suite with default caps")
    r.add_argument("file")
    r.add_argument("--all", action="store_true", help="also run the Cartan, series and finite-GDA checks")
    r.add_argument("--json", metavar="PATH")
    r.set_defaults(func=cmd_report)

    s = sub.add_parser("series", help="print Taylor coefficients of j, ln_j or f")
    s.add_argument("name")
    s.add_argument("--order", type=int, required=True)
    s.set_defaults(func=cmd_series)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except QwkError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
