"""Iteration-count sweeps over seeded random problems.

Every trial draws one problem and runs all requested methods on it, so the
methods are compared on identical systems. Seeds are derived from
``(seed, sweep position, trial)`` and the output does not depend on the
number of worker processes.
"""
from __future__ import annotations

import io
import csv
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .problems import generate_problem
from .solvers import METHODS, SolverConfig, solve

DEFAULT_METHODS = ("grk", "grko", "mwrk", "mwrko")
CSV_COLUMNS = ("sweep", "value", "m", "n", "c", "method", "trials", "converged",
               "median_it", "mean_it", "mean_wall_s")


@dataclass
class BenchSpec:
    """Sweep over row count ``m`` (fixed `n`, `c`) or over ``c`` (fixed `m`, `n`)."""

    sweep: str
    values: list
    n: int
    m: int | None = None
    c: float = 0.0
    methods: tuple[str, ...] = DEFAULT_METHODS
    trials: int = 5
    seed: int = 0
    omega: float = 0.5e-8
    max_iters: int = 100_000

    def __post_init__(self):
        if self.sweep not in ("m", "c"):
            raise ValueError("sweep variable must be 'm' or 'c'")
        if not self.values:
            raise ValueError("sweep value list is empty")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.sweep == "c" and self.m is None:
            raise ValueError("a c sweep needs a fixed m")
        bad = [mt for mt in self.methods if mt not in METHODS]
        if bad:
            raise ValueError(f"unknown methods: {', '.join(bad)}")
        if len(set(self.methods)) != len(self.methods):
            raise ValueError("methods list contains duplicates")
        if self.sweep == "m":
            self.values = [int(v) for v in self.values]
        else:
            self.values = [float(v) for v in self.values]

    def dims(self, value) -> tuple[int, int, float]:
        if self.sweep == "m":
            return int(value), self.n, self.c
        return self.m, self.n, float(value)


@dataclass
class Trial:
    position: int
    trial: int
    method: str
    iterations: int
    converged: bool
    wall_time: float


@dataclass
class BenchRow:
    value: float
    m: int
    n: int
    c: float
    method: str
    trials: list[Trial] = field(default_factory=list)

    @property
    def all_converged(self) -> bool:
        return all(t.converged for t in self.trials)

    @property
    def median_it(self) -> float | None:
        return statistics.median(t.iterations for t in self.trials) if self.all_converged else None

    @property
    def mean_it(self) -> float | None:
        return statistics.fmean(t.iterations for t in self.trials) if self.all_converged else None

    @property
    def mean_wall(self) -> float:
        return statistics.fmean(t.wall_time for t in self.trials)


def _run_trial(spec: BenchSpec, position: int, trial: int) -> list[Trial]:
    m, n, c = spec.dims(spec.values[position])
    problem = generate_problem(m, n, c, seed=[spec.seed, position, trial])
    solver_seed = int(np.random.SeedSequence([spec.seed, position, trial, 1]).generate_state(1)[0])
    out = []
    for method in spec.methods:
        cfg = SolverConfig(method=method, omega=spec.omega, max_iters=spec.max_iters, seed=solver_seed)
        rep = solve(problem, cfg)
        out.append(Trial(position, trial, method, rep.iterations, rep.converged, rep.wall_time))
    return out


def _run_trial_args(args):
    return _run_trial(*args)


def run_bench(spec: BenchSpec, jobs: int = 1) -> list[BenchRow]:
    """Run the sweep; one row per (sweep value, method) in input order."""
    tasks = [(spec, p, t) for p in range(len(spec.values)) for t in range(spec.trials)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_trial_args, tasks))
    else:
        results = [_run_trial(*task) for task in tasks]

    rows = {}
    for p, value in enumerate(spec.values):
        m, n, c = spec.dims(value)
        for method in spec.methods:
            rows[p, method] = BenchRow(value, m, n, c, method)
    for trials in results:
        for t in trials:
            rows[t.position, t.method].trials.append(t)
    for row in rows.values():
        row.trials.sort(key=lambda t: t.trial)
    return list(rows.values())


def _fmt(x) -> str:
    return "-" if x is None else f"{x:g}"


def format_csv(spec: BenchSpec, rows: list[BenchRow], timing: bool = False) -> str:
    """CSV text; iteration stats are ``-`` when any trial hit the cap, wall time
    is left empty unless `timing` is set."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow([
            spec.sweep, _fmt(r.value), r.m, r.n, _fmt(r.c), r.method, len(r.trials),
            sum(t.converged for t in r.trials), _fmt(r.median_it), _fmt(r.mean_it),
            f"{r.mean_wall:.6f}" if timing else "",
        ])
    return buf.getvalue()
