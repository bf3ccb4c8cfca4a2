"""Command-line interface: approximate a matrix file, run benchmark grids,
generate datasets, and diagnose convergence traces.

The CLI is a thin shell over the library; all numeric work happens in the
modules it calls.  Exit codes: 0 success, 2 usage/parse error, 3 numeric
error.
"""

import argparse
import hashlib
import json
import sys

from . import bench as bench_mod
from . import matio
from .datagen import (
    gen_graph_similarity,
    gen_orthogonal_decomposable,
    gen_separable_case1,
    gen_uniform,
)
from .errors import DomainError, InsufficientDataError, NumericError, ParseError, ShapeError
from .linalg import matmul
from .solvers import (
    SolverConfig,
    ap_solve,
    contraction_rate_estimate,
    nmf_hals_solve,
    nmf_mu_solve,
    relative_error,
    tap_solve,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERIC = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nlrm",
        description="Nonnegative low-rank matrix approximation tools",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_approx = sub.add_parser("approx", help="approximate a matrix file")
    p_approx.add_argument("input", help="matrix file (.csv or .mtx)")
    p_approx.add_argument("--method", choices=["tap", "ap", "mu", "hals"], default="tap")
    p_approx.add_argument("--rank", type=int, required=True)
    p_approx.add_argument("--tol", type=float, default=1e-6)
    p_approx.add_argument("--max-iter", type=int, default=1000)
    p_approx.add_argument("--seed", type=int, default=0, help="NMF initialization seed")
    p_approx.add_argument("--output", help="write the nonnegative approximation here")
    p_approx.add_argument("--trace", help="write the JSON result record here")
    p_approx.set_defaults(func=cmd_approx)

    p_bench = sub.add_parser("bench", help="run a benchmark grid")
    p_bench.add_argument("--suite", choices=["table1"], help="use the predefined grid")
    p_bench.add_argument("--sizes", type=int, nargs="+", help="square matrix sizes")
    p_bench.add_argument("--ranks", type=int, nargs="+", help="ranks (with --sizes)")
    p_bench.add_argument("--scale", type=float, default=1.0, help="shrink suite sizes")
    p_bench.add_argument("--methods", nargs="+", default=list(bench_mod.METHODS))
    p_bench.add_argument("--trials", type=int, default=1)
    p_bench.add_argument("--restarts", type=int, default=10)
    p_bench.add_argument("--seed", type=int, default=0)
    p_bench.add_argument("--tol", type=float, default=1e-6)
    p_bench.add_argument("--max-iter", type=int, default=500)
    p_bench.add_argument("--output", required=True, help="report path (.json; .csv written alongside)")
    p_bench.set_defaults(func=cmd_bench)

    p_gen = sub.add_parser("gen", help="generate a synthetic dataset")
    p_gen.add_argument(
        "--family",
        required=True,
        choices=["uniform", "separable_case1", "orthogonal_decomposable", "graph_similarity"],
    )
    p_gen.add_argument("--out", required=True, help="output matrix file (.csv or .mtx)")
    p_gen.add_argument("--m", type=int, default=200)
    p_gen.add_argument("--n", type=int, default=200)
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--sigma", type=float, default=0.0)
    p_gen.add_argument("--points", help="point-cloud file (n x 2 CSV) for graph_similarity")
    p_gen.add_argument("--out-b", help="also write the left factor (separable_case1)")
    p_gen.add_argument("--out-c", help="also write the right factor (separable_case1)")
    p_gen.set_defaults(func=cmd_gen)

    p_diag = sub.add_parser("diag", help="estimate the contraction rate of a trace")
    p_diag.add_argument("--trace", required=True, help="JSON result or trace-record list")
    p_diag.add_argument("--tail-fraction", type=float, default=0.5)
    p_diag.set_defaults(func=cmd_diag)

    return parser


def cmd_approx(args) -> int:
    if args.rank < 1:
        return _usage_error(f"--rank must be >= 1, got {args.rank}")
    if args.tol <= 0:
        return _usage_error(f"--tol must be > 0, got {args.tol}")
    if args.max_iter < 1:
        return _usage_error(f"--max-iter must be >= 1, got {args.max_iter}")
    a = matio.read_matrix(args.input, matio.format_for_path(args.input))
    cfg = SolverConfig(
        rank=args.rank,
        max_iter=args.max_iter,
        rel_change_tol=args.tol,
        seed=args.seed,
    )
    if args.method in ("tap", "ap"):
        solve = tap_solve if args.method == "tap" else ap_solve
        result = solve(a, cfg)
        approx = result.y
        record = matio.result_record(args.method, args.rank, result)
    else:
        solve = nmf_mu_solve if args.method == "mu" else nmf_hals_solve
        b, c, trace = solve(a, cfg)
        approx = matmul(b, c)
        record = matio.nmf_result_record(
            args.method, args.rank, relative_error(a, approx), trace
        )
    if args.output:
        matio.write_matrix(approx, args.output, matio.format_for_path(args.output))
    if args.trace:
        matio.write_json(record, args.trace)
    print(
        f"method={record['method']} rank={record['rank']} "
        f"rel_error={record['rel_error_x']:.6g} iters={record['iters']} "
        f"seconds={record['seconds']:.4g}"
    )
    return EXIT_OK


def cmd_bench(args) -> int:
    for method in args.methods:
        if method not in bench_mod.METHODS:
            return _usage_error(f"unknown method {method!r}")
    if args.suite == "table1":
        grid = bench_mod.table1_grid(scale=args.scale, sizes=args.sizes)
        suite = "table1"
    elif args.sizes and args.ranks:
        grid = [(n, r) for n in args.sizes for r in args.ranks]
        suite = "custom"
    else:
        return _usage_error("provide --suite table1 or both --sizes and --ranks")
    for n, r in grid:
        if r < 1 or r > n:
            return _usage_error(f"invalid cell: size {n} with rank {r}")

    report = bench_mod.run_bench(
        grid,
        methods=tuple(args.methods),
        trials=args.trials,
        restarts=args.restarts,
        seed=args.seed,
        tol=args.tol,
        max_iter=args.max_iter,
        suite=suite,
    )
    matio.write_json(report.to_dict(), args.output)
    csv_path = _sibling_csv(args.output)
    with open(csv_path, "w") as fh:
        fh.write("\n".join(bench_mod.report_csv_lines(report)) + "\n")
    failed = [c for c in report.cells if c.error is not None]
    for cell in failed:
        print(
            f"cell {cell.m}x{cell.n} r={cell.rank} {cell.method}: {cell.error}",
            file=sys.stderr,
        )
    print(
        f"bench suite={report.suite} cells={len(report.cells)} "
        f"failed={len(failed)} report={args.output} csv={csv_path}"
    )
    return EXIT_NUMERIC if failed and len(failed) == len(report.cells) else EXIT_OK


def cmd_gen(args) -> int:
    if args.sigma < 0:
        return _usage_error(f"--sigma must be >= 0, got {args.sigma}")
    if args.family == "uniform":
        if args.m < 1 or args.n < 1:
            return _usage_error("--m and --n must be >= 1")
        matrix = gen_uniform(args.m, args.n, args.seed)
    elif args.family == "separable_case1":
        matrix, b_true, c_true = gen_separable_case1(args.sigma, args.seed)
        if args.out_b:
            matio.write_matrix(b_true, args.out_b, matio.format_for_path(args.out_b))
        if args.out_c:
            matio.write_matrix(c_true, args.out_c, matio.format_for_path(args.out_c))
    elif args.family == "orthogonal_decomposable":
        matrix = gen_orthogonal_decomposable(args.sigma, args.seed)
    else:
        if not args.points:
            return _usage_error("graph_similarity requires --points")
        points = matio.read_matrix(args.points, matio.format_for_path(args.points))
        matrix = gen_graph_similarity(points)
    matio.write_matrix(matrix, args.out, matio.format_for_path(args.out))
    digest = hashlib.sha256(open(args.out, "rb").read()).hexdigest()
    print(f"{matrix.shape[0]}x{matrix.shape[1]} sha256={digest}")
    return EXIT_OK


def cmd_diag(args) -> int:
    trace = matio.read_trace(args.trace)
    try:
        c_hat, r_squared = contraction_rate_estimate(trace, args.tail_fraction)
    except InsufficientDataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    final = trace.records[-1]
    print(
        f"c_hat={c_hat:.6g} r_squared={r_squared:.6g} "
        f"iterations={len(trace)} final_rel_error={final.rel_error:.6g}"
    )
    return EXIT_OK


def _usage_error(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return EXIT_USAGE


def _sibling_csv(path: str) -> str:
    return (path[: -len(".json")] if path.endswith(".json") else path) + ".csv"


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse reports usage errors with exit 2
        return int(exc.code) if exc.code else EXIT_OK
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, DomainError, ShapeError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


def console_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
