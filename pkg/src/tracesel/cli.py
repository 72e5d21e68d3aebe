"""Command-line front end.

Exit codes: 0 success, 2 invalid input or validation failure, 3 parse
failure, 4 numerical failure.
"""

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .bounds import (
    admissible_min_k,
    bound_corollary3,
    bound_corollary6,
    bound_theorem1,
    bound_theorem2,
)
from .config import ENUM_CAP
from .errors import NumericalError, ParseError, TraceselError
from .generate import random_block_problem, random_columns
from .io import (
    dumps,
    parse_block_manifest,
    parse_matrix_file,
    report_to_dict,
    write_block_manifest,
    write_csv,
)
from .linalg import TraceFunctionals
from .oracle import exhaustive_min_trace, verify_report
from .problem import ColumnProblem
from .selection import column_minimal_k, minimal_k, run_block_selection, run_column_selection

EXIT_OK, EXIT_INVALID, EXIT_PARSE, EXIT_NUMERICAL = 0, 2, 3, 4


def _parse_k(text):
    if text == "min":
        return "min"
    try:
        k = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"k must be an integer or 'min', got {text!r}") from None
    if k < 0:
        raise argparse.ArgumentTypeError("k must be non-negative")
    return k


def _parse_keep(text):
    try:
        idx = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"--keep expects comma-separated integers, got {text!r}") from None
    if any(i < 1 for i in idx):
        raise argparse.ArgumentTypeError("--keep indices are 1-based")
    return tuple(i - 1 for i in idx)


def build_parser():
    p = argparse.ArgumentParser(
        prog="tracesel",
        description="Greedy subset selection with trace-of-inverse guarantees.",
    )
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    sc = sub.add_parser("select-columns", help="choose columns of U")
    sc.add_argument("--input", required=True, type=Path, help="U as CSV or Matrix Market")
    sc.add_argument("--keep", type=_parse_keep, default=(), help="1-based columns to keep, e.g. 1,4,7")
    sc.add_argument("--k", type=_parse_k, default=None, help="columns to add, or 'min' (default: min)")
    sc.add_argument("--out", type=Path, default=None)

    sb = sub.add_parser("select-blocks", help="choose PSD blocks from a manifest")
    sb.add_argument("--manifest", required=True, type=Path)
    sb.add_argument("--k", type=_parse_k, default=None, help="blocks to keep, or 'min' (default: min)")
    sb.add_argument("--out", type=Path, default=None)

    so = sub.add_parser("oracle", help="exhaustive check of the greedy choice")
    so.add_argument("--manifest", required=True, type=Path)
    so.add_argument("--k", type=_parse_k, required=True)
    so.add_argument("--enum-cap", type=int, default=ENUM_CAP)
    so.add_argument("--out", type=Path, default=None)

    bd = sub.add_parser("bound", help="evaluate a closed-form bound")
    bd.add_argument("--m", type=int, required=True)
    bd.add_argument("--n", type=int, required=True)
    bd.add_argument("--k", type=int, default=None)
    bd.add_argument("--r", type=int, default=None, help="unit columns kept in an isotropic U")
    bd.add_argument("--tr-ainv", type=float, default=None)
    bd.add_argument("--tr-ainvb", type=float, default=None)
    bd.add_argument("--tr-a2invb", type=float, default=None)
    bd.add_argument("--out", type=Path, default=None)

    gn = sub.add_parser("gen", help="write a seeded random instance")
    gn.add_argument("--kind", choices=("columns", "blocks"), required=True)
    gn.add_argument("--n", type=int, required=True)
    gn.add_argument("--m", type=int, required=True)
    gn.add_argument("--seed", type=int, required=True)
    gn.add_argument("--fixed-rank", type=int, default=0, help="rank of the kept block (blocks only)")
    gn.add_argument("--out", type=Path, required=True, help="output directory")
    return p


def _write(text, out):
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text, encoding="utf-8")


def _cmd_select_columns(args):
    u = parse_matrix_file(args.input)
    problem = ColumnProblem(u, fixed=args.keep)
    k = args.k
    if k in (None, "min"):
        k = column_minimal_k(problem)
    report = run_column_selection(problem, k)
    _write(dumps(report_to_dict(report, __version__, kept=problem.fixed)), args.out)


def _cmd_select_blocks(args):
    problem = parse_block_manifest(args.manifest)
    k = args.k
    if k in (None, "min"):
        k = minimal_k(problem)
    report = run_block_selection(problem, k)
    _write(dumps(report_to_dict(report, __version__)), args.out)


def _cmd_oracle(args):
    problem = parse_block_manifest(args.manifest)
    k = minimal_k(problem) if args.k == "min" else args.k
    report = run_block_selection(problem, k)
    result = exhaustive_min_trace(problem, k, enum_cap=args.enum_cap)
    summary = verify_report(problem, k, report, oracle=result)
    doc = {
        "k": k,
        "best_subset": [i + 1 for i in result.best_subset],
        "best_value": result.best_value,
        "feasible_count": result.feasible_count,
        "enumerated": result.enumerated,
        "greedy": report_to_dict(report, __version__),
        "checks": {c.name: c.passed for c in summary.checks},
        "passed": summary.passed,
        "tool_version": __version__,
    }
    _write(dumps(doc), args.out)
    return EXIT_OK if summary.passed else EXIT_NUMERICAL


def _cmd_bound(args):
    m, n, k = args.m, args.n, args.k
    inputs = {"m": m, "n": n}
    if args.r is not None:
        inputs["r"] = args.r
        bound, name = bound_corollary3(m, n, args.r), "corollary3"
    elif args.tr_ainv is None:
        raise TraceselError("bound needs --tr-ainv (or --r for the isotropic case)")
    elif args.tr_ainvb is not None:
        tf = TraceFunctionals(args.tr_ainv, args.tr_ainvb, args.tr_a2invb or 0.0)
        if k is None:
            k = admissible_min_k(n, tf.tr_ainv_b)
        inputs.update(k=k, tr_ainv=tf.tr_ainv, tr_ainvb=tf.tr_ainv_b, tr_a2invb=tf.tr_a2inv_b)
        bound, name = bound_theorem2(m, n, k, tf), "theorem2"
    elif k is None or k == n:
        inputs.update(k=n, tr_ainv=args.tr_ainv)
        bound, name = bound_theorem1(m, n, args.tr_ainv), "theorem1"
    else:
        inputs.update(k=k, tr_ainv=args.tr_ainv)
        bound, name = bound_corollary6(m, n, k, args.tr_ainv), "corollary6"
    _write(dumps({"bound": float(bound), "bound_name": name, "inputs": inputs}), args.out)


def _cmd_gen(args):
    rng = np.random.default_rng(args.seed)
    args.out.mkdir(parents=True, exist_ok=True)
    if args.kind == "columns":
        path = args.out / "U.csv"
        write_csv(path, random_columns(args.n, args.m, rng))
    else:
        problem = random_block_problem(args.n, args.m, rng, fixed_rank=args.fixed_rank)
        path = write_block_manifest(args.out, problem)
    sys.stdout.write(f"{path}\n")


_COMMANDS = {
    "select-columns": _cmd_select_columns,
    "select-blocks": _cmd_select_blocks,
    "oracle": _cmd_oracle,
    "bound": _cmd_bound,
    "gen": _cmd_gen,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        code = _COMMANDS[args.command](args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (TraceselError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK if code is None else code


if __name__ == "__main__":
    sys.exit(main())
