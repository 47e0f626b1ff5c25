import csv
import io

import pytest

from oblique_kaczmarz.bench import CSV_COLUMNS, BenchSpec, format_csv, run_bench
from oblique_kaczmarz.problems import generate_problem
from oblique_kaczmarz.solvers import SolverConfig, solve


def parse(text):
    return list(csv.DictReader(io.StringIO(text)))


@pytest.mark.parametrize("kwargs", [
    {"sweep": "n", "values": [1], "n": 5},
    {"sweep": "m", "values": [], "n": 5},
    {"sweep": "m", "values": [10], "n": 5, "trials": 0},
    {"sweep": "c", "values": [0.1], "n": 5},
    {"sweep": "m", "values": [10], "n": 5, "methods": ("kaczmarz",)},
    {"sweep": "m", "values": [10], "n": 5, "methods": ("grk", "grk")},
])
def test_invalid_spec(kwargs):
    with pytest.raises(ValueError):
        BenchSpec(**kwargs)


def test_one_row_per_value_and_method():
    spec = BenchSpec(sweep="m", values=["30", "40"], n=10, trials=3, methods=("grko", "cyclic"))
    rows = run_bench(spec)
    assert [(r.m, r.method) for r in rows] == [(30, "grko"), (30, "cyclic"), (40, "grko"), (40, "cyclic")]
    assert all(len(r.trials) == 3 and r.all_converged for r in rows)
    text = parse(format_csv(spec, rows))
    assert list(text[0]) == list(CSV_COLUMNS)
    assert text[0]["mean_wall_s"] == ""


def test_trial_problems_follow_seed_path():
    # MWR selection is deterministic, so the iteration count pins the problem
    spec = BenchSpec(sweep="m", values=[25], n=10, trials=2, methods=("grk", "mwrk"), seed=4)
    row = run_bench(spec)[1]
    for t in range(2):
        rep = solve(generate_problem(25, 10, 0.0, seed=[4, 0, t]), SolverConfig("mwrk"))
        assert row.trials[t].iterations == rep.iterations


def test_worker_count_does_not_change_output():
    spec = BenchSpec(sweep="c", values=[0.0, 0.5], m=30, n=10, trials=2)
    assert format_csv(spec, run_bench(spec, jobs=1)) == format_csv(spec, run_bench(spec, jobs=2))


def test_cap_rendered_as_dash():
    spec = BenchSpec(sweep="m", values=[40], n=20, trials=2, methods=("grk", "mwrko"), max_iters=60)
    rows = {r["method"]: r for r in parse(format_csv(spec, run_bench(spec)))}
    assert rows["grk"]["median_it"] == "-" and rows["grk"]["mean_it"] == "-"
    assert rows["grk"]["converged"] == "0"


def test_timing_column():
    spec = BenchSpec(sweep="m", values=[20], n=5, trials=1, methods=("grk",))
    assert float(parse(format_csv(spec, run_bench(spec), timing=True))[0]["mean_wall_s"]) >= 0
