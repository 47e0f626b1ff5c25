"""Command-line interface: ``solve``, ``bench``, ``constants``, ``gen`` and ``oracle``.

All subcommands print one JSON object (``bench`` prints CSV) to stdout.
Outputs are byte-identical for identical flags; wall-clock values are only
written when ``--timing`` is given.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
import warnings
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import DELTA_SCAN_LIMIT, bound_factors, compute_constants
from .bench import DEFAULT_METHODS, BenchSpec, format_csv, run_bench
from .oracle import InconsistentSystemError, least_norm_solution
from .problems import generate_problem, load_problem, write_matrix_market, write_vector
from .solvers import METHODS, SolverConfig, solve

PRESETS = {"dense": 0.5e-8, "sparse": 0.5e-5}


class CLIError(Exception):
    pass


def _dims(text: str) -> tuple[int, int]:
    try:
        m, n = (int(p) for p in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected MxN, got {text!r}") from None
    if m < 1 or n < 1:
        raise argparse.ArgumentTypeError("dimensions must be positive")
    return m, n


def _csv_list(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def _add_source(p: argparse.ArgumentParser):
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--matrix", type=Path, help="Matrix Market file")
    src.add_argument("--gen-uniform", type=_dims, metavar="MxN", help="uniform random [c,1] matrix")
    p.add_argument("--b", type=Path, help="right-hand side sidecar, one value per line (with --matrix)")
    p.add_argument("--c", type=float, default=0.0, help="lower end of the entry interval [c,1]")
    p.add_argument("--seed", type=int, default=0, help="problem seed")
    p.add_argument("--drop-zero-rows", action="store_true", help="remove all-zero rows of a loaded matrix")
    p.add_argument("--normalize", action="store_true", help="scale rows of A and b to unit norm")
    p.add_argument("--allow-pattern", action="store_true", help="read pattern matrices with unit values")


def _problem(args):
    if args.gen_uniform is not None:
        if args.b is not None:
            raise CLIError("--b only applies to --matrix")
        p = generate_problem(*args.gen_uniform, c=args.c, seed=args.seed)
        return p.normalized() if args.normalize else p
    return load_problem(args.matrix, args.b, drop_zero_rows=args.drop_zero_rows,
                        normalize=args.normalize, seed=args.seed, allow_pattern=args.allow_pattern)


def _emit(obj):
    print(json.dumps(obj, indent=2))


def cmd_solve(args) -> int:
    problem = _problem(args)
    omega = args.tol if args.tol is not None else PRESETS[args.preset]
    cfg = SolverConfig(method=args.method, omega=omega, max_iters=args.max_iters,
                       seed=args.seed if args.solver_seed is None else args.solver_seed,
                       history_stride=args.history_stride)
    rep = solve(problem, cfg)
    summary = {"m": problem.A.n_rows, "n": problem.A.n_cols, "omega": omega, **rep.summary()}
    if args.timing:
        summary["wall_time_s"] = rep.wall_time
    if args.history:
        with open(args.history, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["iter", "rre", "wall_ns"])
            for (k, v), ns in zip(rep.rre_history, rep.history_wall_ns):
                w.writerow([k, repr(v), ns if args.timing else ""])
    if args.solution:
        write_vector(args.solution, rep.final_x)
    if args.summary:
        Path(args.summary).write_text(json.dumps(summary, indent=2) + "\n")
    _emit(summary)
    return 0


def cmd_bench(args) -> int:
    values = _csv_list(args.values)
    spec = BenchSpec(sweep=args.sweep, values=values, n=args.n, m=args.m, c=args.c,
                     methods=tuple(_csv_list(args.methods)), trials=args.trials, seed=args.seed,
                     omega=args.tol if args.tol is not None else PRESETS[args.preset],
                     max_iters=args.max_iters)
    text = format_csv(spec, run_bench(spec, jobs=args.jobs), timing=args.timing)
    if args.out:
        Path(args.out).write_text(text)
    sys.stdout.write(text)
    return 0


def cmd_constants(args) -> int:
    problem = _problem(args)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)  # reported below in CLI form
        consts = compute_constants(problem.A, delta_limit=args.delta_limit)
    if consts.delta is None and consts.m > args.delta_limit:
        print(f"warning: {consts.m} rows exceeds --delta-limit {args.delta_limit}; delta is null",
              file=sys.stderr)
    factors = bound_factors(consts)
    if factors.negative:
        print(f"warning: negative factors {', '.join(factors.negative)}", file=sys.stderr)
    _emit({"constants": asdict(consts), "factors": factors.as_dict()})
    return 0


def cmd_gen(args) -> int:
    m, n = args.gen_uniform
    p = generate_problem(m, n, c=args.c, seed=args.seed)
    prefix = Path(args.out)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    paths = {"matrix": f"{prefix}.mtx", "b": f"{prefix}.b", "x_star": f"{prefix}.x"}
    write_matrix_market(paths["matrix"], p.A, comment=f"uniform [{args.c}, 1], seed {args.seed}")
    write_vector(paths["b"], p.b)
    write_vector(paths["x_star"], p.x_star)
    _emit({"m": m, "n": n, "c": args.c, "seed": args.seed, **paths})
    return 0


def cmd_oracle(args) -> int:
    problem = _problem(args)
    try:
        x = least_norm_solution(problem.A, problem.b)
    except InconsistentSystemError as exc:
        raise CLIError(str(exc)) from exc
    res = float(np.linalg.norm(problem.b - problem.A.matvec(x)))
    out = {"m": problem.A.n_rows, "n": problem.A.n_cols,
           "residual_norm": res, "relative_residual": res / float(np.linalg.norm(problem.b)),
           "solution_norm": float(np.linalg.norm(x))}
    if problem.x_star is not None:
        out["distance_to_x_star"] = float(np.linalg.norm(x - problem.x_star))
    if args.out:
        write_vector(args.out, x)
        out["solution"] = str(args.out)
    _emit(out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="oblique-kaczmarz",
                                     description="Kaczmarz-type solvers with oblique projection")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_tol(p):
        p.add_argument("--tol", type=float, help="stop when RRE < tol (overrides --preset)")
        p.add_argument("--preset", choices=sorted(PRESETS), default="dense",
                       help="dense: tol 0.5e-8, sparse: tol 0.5e-5")
        p.add_argument("--max-iters", type=int, default=100_000)
        p.add_argument("--timing", action="store_true", help="write wall-clock columns")

    p = sub.add_parser("solve", help="solve one system")
    _add_source(p)
    p.add_argument("--method", choices=METHODS, default="grko")
    add_tol(p)
    p.add_argument("--solver-seed", type=int, help="selection seed (defaults to --seed)")
    p.add_argument("--history-stride", type=int)
    p.add_argument("--history", type=Path, help="write convergence history CSV")
    p.add_argument("--summary", type=Path, help="write the JSON summary to a file as well")
    p.add_argument("--solution", type=Path, help="write the final iterate, one value per line")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("bench", help="iteration-count sweep over random problems")
    p.add_argument("--sweep", choices=("m", "c"), required=True)
    p.add_argument("--values", required=True, help="comma-separated sweep values")
    p.add_argument("--m", type=int, help="fixed row count (c sweep)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--c", type=float, default=0.0, help="fixed c (m sweep)")
    p.add_argument("--methods", default=",".join(DEFAULT_METHODS))
    p.add_argument("--trials", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p.add_argument("--out", type=Path, help="also write the CSV to this file")
    add_tol(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("constants", help="convergence constants and bound factors")
    _add_source(p)
    p.add_argument("--delta-limit", type=int, default=DELTA_SCAN_LIMIT)
    p.set_defaults(func=cmd_constants)

    p = sub.add_parser("gen", help="write a generated problem as .mtx plus sidecars")
    p.add_argument("--gen-uniform", type=_dims, metavar="MxN", required=True)
    p.add_argument("--c", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output prefix; writes PREFIX.mtx, PREFIX.b, PREFIX.x")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("oracle", help="least-norm solution by dense pseudoinverse")
    _add_source(p)
    p.add_argument("--out", type=Path, help="write the solution vector")
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CLIError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
