import io
import json
import logging
import math
import os

import numpy as np
import pytest

from helpers import RIVERSWIM_TAUS
from loopeval import __version__
from loopeval.chains import build_mk_chain
from loopeval.experiments import (
    DEFAULT_ESTIMATORS,
    EXPERIMENTS,
    ExperimentConfig,
    ExperimentError,
    OutputExistsError,
    build_riverswim,
    parse_estimators,
    run_comparison,
    run_rate_experiment,
    run_tau_experiment,
    write_report,
)
from loopeval.experiments.harness import checkpoint_grid, line_fit, parse_estimator
from loopeval.experiments.report import AtomicWriter, dump_csv
from loopeval.experiments.runner import map_runs
from loopeval.mrp import DiscountError, validate


def _square(x):
    return x * x


# -----------------
# RiverSwim
# -----------------


def test_riverswim_matrix():
    mrp = build_riverswim()
    assert validate(mrp) == []
    p = mrp.transitions
    assert p[0].tolist() == [0.7, 0.3, 0.0, 0.0, 0.0, 0.0]
    assert p[3].tolist() == [0.0, 0.0, 0.1, 0.6, 0.3, 0.0]
    assert p[5].tolist() == [0.0, 0.0, 0.0, 0.0, 0.7, 0.3]
    assert [r.mean for r in mrp.rewards] == [0.0] * 5 + [1.0]
    assert mrp.r_max == 1.0


# -----------------
# Parameters
# -----------------


def test_checkpoint_grid():
    grid = checkpoint_grid(100, 4, 100000)
    assert grid[:5] == [100, 178, 316, 562, 1000]
    assert grid[-1] == 100000
    assert len(grid) == 13
    assert checkpoint_grid(100, 4, 100) == [100]
    assert checkpoint_grid(100, 4, 150) == [100, 150]
    assert checkpoint_grid(100, 4, 50) == [50]


def test_parse_estimators():
    specs = parse_estimators("loop, mb,td(0,1),td(10),td(0, 0.5)")
    assert specs == DEFAULT_ESTIMATORS
    assert [s.label for s in specs] == ["loop", "mb", "td(0,1)", "td(10,1)", "td(0,0.5)"]
    assert parse_estimator("model_based").label == "mb"


@pytest.mark.parametrize("text", ["", "sarsa", "td(0,0.4)", "td(1,x)", "td(-1)", "loop,,td(2"])
def test_parse_estimators_rejects(text):
    with pytest.raises(ExperimentError):
        parse_estimators(text)


def test_experiment_config_defaults():
    config = ExperimentConfig()
    d = config.to_dict()
    assert d["gamma"] == 0.9
    assert d["steps"] == 100000
    assert d["runs"] == 200
    assert d["start_state"] == "s1"
    assert d["estimators"] == ["loop", "mb", "td(0,1)", "td(10,1)", "td(0,0.5)"]
    assert "jobs" not in d


@pytest.mark.parametrize(
    "changes",
    [
        {"steps": 0},
        {"runs": 0},
        {"jobs": 0},
        {"first_checkpoint": 0},
        {"rate_counts": (100, 10)},
        {"estimators": ()},
    ],
)
def test_experiment_config_rejects(changes):
    with pytest.raises(ExperimentError):
        ExperimentConfig(**changes)


def test_experiment_config_rejects_discount():
    with pytest.raises(DiscountError):
        ExperimentConfig(gamma=1.0)


def test_line_fit():
    fit = line_fit([1.0, 2.0, 3.0], [3.0, 5.0, 7.0])
    assert fit["slope"] == pytest.approx(2.0)
    assert fit["intercept"] == pytest.approx(1.0)
    assert fit["pearson_r"] == pytest.approx(1.0)
    assert all(math.isnan(v) for v in line_fit([1.0, 1.0], [2.0, 3.0]).values())
    # non-finite points are dropped
    assert line_fit([1.0, 2.0, 3.0], [1.0, 2.0, float("nan")])["slope"] == pytest.approx(1.0)


def test_map_runs_keeps_order():
    tasks = list(range(20))
    assert map_runs(_square, tasks, jobs=1) == [x * x for x in tasks]
    assert map_runs(_square, tasks, jobs=3) == [x * x for x in tasks]
    assert map_runs(_square, [], jobs=3) == []


# -----------------
# Experiments
# -----------------


def test_tau_experiment_small():
    report = run_tau_experiment(ExperimentConfig(steps=3000, runs=3))
    table = report.tables["tau.csv"]
    assert table.header == ("state", "tau", "sqrt_tau", "mean_error", "std_error")
    assert [row[0] for row in table.rows] == ["s1", "s2", "s3", "s4", "s5", "s6"]
    np.testing.assert_allclose([row[1] for row in table.rows], RIVERSWIM_TAUS, rtol=1e-9)
    assert all(row[3] >= 0.0 and row[4] >= 0.0 for row in table.rows)
    assert set(report.fit) == {"slope", "intercept", "pearson_r", "r_squared"}


def test_tau_experiment_is_reproducible():
    config = ExperimentConfig(steps=2000, runs=3, seed_base=7)
    a = run_tau_experiment(config)
    b = run_tau_experiment(config)
    assert a.tables["tau.csv"].rows == b.tables["tau.csv"].rows


def test_comparison_small():
    config = ExperimentConfig(steps=1000, runs=2)
    report = run_comparison(config)
    checkpoints = [100, 178, 316, 562, 1000]
    assert report.summary["checkpoints"] == checkpoints
    rows = report.tables["comparison.csv"].rows
    assert len(rows) == 2 * len(DEFAULT_ESTIMATORS) * len(checkpoints)
    assert rows[0][:3] == (0, "loop", 100)
    assert all(row[3] >= 0.0 for row in rows)
    assert list(report.summary["final"]) == [e.label for e in DEFAULT_ESTIMATORS]


def test_comparison_does_not_depend_on_jobs():
    estimators = parse_estimators("loop,mb,td(2,0.75)")
    one = run_comparison(ExperimentConfig(steps=800, runs=3, estimators=estimators, jobs=1))
    two = run_comparison(ExperimentConfig(steps=800, runs=3, estimators=estimators, jobs=2))
    assert one.tables["comparison.csv"].rows == two.tables["comparison.csv"].rows
    assert one.meta() == two.meta()


def test_comparison_without_loops_uses_worst_case(caplog):
    config = ExperimentConfig(steps=10, runs=1, first_checkpoint=5, estimators=parse_estimators("loop"))
    with caplog.at_level(logging.WARNING):
        report = run_comparison(config)
    scale = report.values.max()
    # ten steps are too few to close a loop through every state
    assert report.summary["final"]["loop"]["mean"] == pytest.approx(10.0 / scale)
    assert "worst-case" in caplog.text


def test_rate_experiment_small():
    config = ExperimentConfig(steps=5000, runs=3, rate_counts=(10, 100))
    report = run_rate_experiment(config)
    rows = report.tables["rate.csv"].rows
    assert [row[0] for row in rows] == [10, 18, 32, 56, 100]
    bounds = [row[3] for row in rows]
    assert all(b > a for (a, b) in zip(bounds[1:], bounds))
    assert all(0.0 <= row[4] <= 1.0 for row in rows)


def test_rate_experiment_with_too_few_loops(caplog):
    config = ExperimentConfig(steps=500, runs=2, rate_counts=(10, 100000))
    with caplog.at_level(logging.WARNING):
        report = run_rate_experiment(config)
    rows = report.tables["rate.csv"].rows
    assert not math.isnan(rows[0][1])
    assert math.isnan(rows[-1][1])
    assert "increase the horizon" in caplog.text


def test_experiment_rejects_zero_values():
    with pytest.raises(ExperimentError):
        run_tau_experiment(ExperimentConfig(steps=100, runs=1), mrp=build_mk_chain(3))


def test_experiment_rejects_bad_start_state():
    with pytest.raises(ExperimentError):
        run_tau_experiment(ExperimentConfig(steps=100, runs=1, start_state=6))
    with pytest.raises(ExperimentError):
        run_rate_experiment(ExperimentConfig(steps=100, runs=1, rate_target=6))


def test_experiment_registry():
    assert list(EXPERIMENTS) == ["tau", "comparison", "rate"]


# -----------------
# Reports
# -----------------


def test_dump_csv_cells():
    f = io.StringIO()
    dump_csv(f, ("a", "b", "c", "d"), [(1, 0.1, True, "s1"), (np.int64(2), np.float64(1e-20), False, "s2")])
    assert f.getvalue() == "a,b,c,d\n1,0.1,true,s1\n2,1e-20,false,s2\n"


def test_atomic_writer_leaves_nothing_on_failure(tmp_path):
    path = tmp_path / "out.csv"
    with pytest.raises(RuntimeError):
        with AtomicWriter(str(path)) as w:
            w.file.write("partial")
            raise RuntimeError("interrupted")
    assert os.listdir(str(tmp_path)) == []


def test_write_report(tmp_path):
    report = run_tau_experiment(ExperimentConfig(steps=1000, runs=2))
    out = tmp_path / "results"
    paths = write_report(report, str(out))
    assert sorted(os.listdir(str(out))) == ["meta.json", "tau.csv"]
    assert [os.path.basename(p) for p in paths] == ["tau.csv", "meta.json"]

    lines = (out / "tau.csv").read_text(encoding="utf-8").splitlines()
    assert lines[0] == "state,tau,sqrt_tau,mean_error,std_error"
    assert len(lines) == 7

    meta = json.loads((out / "meta.json").read_text(encoding="utf-8"))
    assert meta["mode"] == "tau"
    assert meta["version"] == __version__
    assert meta["config"]["runs"] == 2
    assert len(meta["exact_values"]) == 6


def test_write_report_refuses_to_overwrite(tmp_path):
    report = run_tau_experiment(ExperimentConfig(steps=1000, runs=1))
    write_report(report, str(tmp_path))
    before = (tmp_path / "tau.csv").read_bytes()
    with pytest.raises(OutputExistsError) as e:
        write_report(report, str(tmp_path))
    assert len(e.value.paths) == 2
    write_report(report, str(tmp_path), force=True)
    assert (tmp_path / "tau.csv").read_bytes() == before


# -----------------
# Acceptance runs
# -----------------


@pytest.mark.slow
def test_tau_experiment_error_tracks_sqrt_tau():
    report = run_tau_experiment(ExperimentConfig(gamma=0.9, steps=100000, runs=200, jobs=4))
    assert report.fit["pearson_r"] >= 0.9


@pytest.mark.slow
def test_comparison_ordering():
    estimators = parse_estimators("loop,mb,td(0,1),td(10,1)")
    config = ExperimentConfig(gamma=0.9, steps=100000, runs=200, estimators=estimators, jobs=4)
    final = run_comparison(config).summary["final"]

    def beats(better, worse):
        a, b = final[better], final[worse]
        pooled = math.sqrt((a["std"] ** 2 + b["std"] ** 2) / config.runs)
        return a["mean"] + pooled <= b["mean"]

    assert beats("mb", "loop")
    assert beats("td(10,1)", "td(0,1)")


@pytest.mark.slow
def test_loop_error_shrinks_like_inverse_sqrt_of_loops():
    config = ExperimentConfig(gamma=0.9, steps=100000, runs=200, rate_target=3, rate_counts=(100, 10000), jobs=4)
    report = run_rate_experiment(config)
    assert -0.65 <= report.fit["slope"] <= -0.35


@pytest.mark.slow
def test_visit_error_bound_coverage():
    runs, delta = 200, 0.1
    config = ExperimentConfig(steps=20000, runs=runs, delta=delta, rate_counts=(100, 1000), checkpoints_per_decade=1)
    rows = run_rate_experiment(config).tables["rate.csv"].rows
    assert [row[0] for row in rows] == [100, 1000]
    for row in rows:
        assert row[4] <= delta + 3 * math.sqrt(delta * (1 - delta) / runs)


@pytest.mark.slow
def test_tau_experiment_errors_shrink_with_horizon():
    short = run_tau_experiment(ExperimentConfig(steps=100000, runs=40, jobs=4))
    long = run_tau_experiment(ExperimentConfig(steps=1000000, runs=40, jobs=4))
    before = [row[3] for row in short.tables["tau.csv"].rows]
    after = [row[3] for row in long.tables["tau.csv"].rows]
    assert all(b < a for (a, b) in zip(before, after))


@pytest.mark.slow
def test_loop_error_is_less_sensitive_to_discount_than_td0():
    estimators = parse_estimators("loop,td(0,1)")
    final = {}
    for gamma in (0.9, 0.99):
        config = ExperimentConfig(gamma=gamma, steps=100000, runs=40, estimators=estimators, jobs=4)
        final[gamma] = run_comparison(config).summary["final"]

    def change(label):
        return abs(final[0.99][label]["mean"] - final[0.9][label]["mean"])

    assert change("loop") < change("td(0,1)")


@pytest.mark.slow
def test_model_based_error_does_not_grow_on_average():
    runs = 200
    config = ExperimentConfig(steps=100000, runs=runs, estimators=parse_estimators("mb"), jobs=4)
    report = run_comparison(config)
    (mean,) = report.summary["mean"]
    (std,) = report.summary["std"]
    for j in range(1, len(mean)):
        slack = 2 * math.sqrt((std[j - 1] ** 2 + std[j] ** 2) / runs)
        assert mean[j] <= mean[j - 1] + slack
