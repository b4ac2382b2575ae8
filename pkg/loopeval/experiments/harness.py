"""Seeded replications of the value estimators on a single MRP

Every run draws one sample path from ``seed_base + run_index`` and feeds it
to every estimator, so the estimators are always compared on identical
data. Errors are sup-norm errors divided by the largest exact value.
"""

import logging
import math
import re
from collections import OrderedDict, namedtuple

import numpy as np
from scipy.stats import linregress

from ..analysis import hitting_profile
from ..bounds import visit_error_bound
from ..estimators import ModelBasedEstimator, TDEstimator, loop_statistics, running_estimates
from ..estimators.loop import loops_closed_by
from ..mrp import check_discount, exact_values, simulate
from ..utils.rng import check_seed, run_seed
from ..utils.text import state_label
from .riverswim import build_riverswim
from .runner import map_runs

_logger = logging.getLogger(__name__)


class ExperimentError(ValueError):
    pass


# -----------------
# Estimator descriptors
# -----------------


class EstimatorSpec(namedtuple("EstimatorSpec", ("kind", "k", "d"))):
    __slots__ = ()

    @property
    def label(self):
        if self.kind == "td":
            return "td({0},{1:g})".format(self.k, self.d)
        return self.kind


LOOP = EstimatorSpec("loop", None, None)
MODEL_BASED = EstimatorSpec("mb", None, None)


def td_spec(k, d):
    return EstimatorSpec("td", int(k), float(d))


DEFAULT_ESTIMATORS = (LOOP, MODEL_BASED, td_spec(0, 1.0), td_spec(10, 1.0), td_spec(0, 0.5))

_TD_PATTERN = re.compile(r"^td\(\s*(\d+)\s*(?:,\s*([^)\s]+)\s*)?\)$")
_LIST_SEP = re.compile(r",(?![^(]*\))")


def parse_estimator(text):
    """``loop``, ``mb`` or ``td(k,d)``; ``td(k)`` means d = 1"""
    name = text.strip().lower()
    if name == "loop":
        return LOOP
    if name in ("mb", "model_based"):
        return MODEL_BASED
    m = _TD_PATTERN.match(name)
    if m:
        try:
            d = float(m.group(2)) if m.group(2) is not None else 1.0
        except ValueError:
            raise ExperimentError("bad learning-rate exponent in {0!r}".format(text))
        if not (0.5 <= d <= 1.0):
            raise ExperimentError("d must lie in [0.5, 1] in {0!r}".format(text))
        return td_spec(int(m.group(1)), d)
    raise ExperimentError("unknown estimator {0!r}".format(text))


def parse_estimators(text):
    specs = [parse_estimator(item) for item in _LIST_SEP.split(text) if item.strip()]
    if not specs:
        raise ExperimentError("empty estimator list")
    return tuple(specs)


# -----------------
# Configuration
# -----------------


class ExperimentConfig(object):
    __slots__ = (
        "gamma",
        "steps",
        "runs",
        "seed_base",
        "estimators",
        "start_state",
        "first_checkpoint",
        "checkpoints_per_decade",
        "delta",
        "rate_target",
        "rate_counts",
        "jobs",
    )

    def __init__(
        self,
        gamma=0.9,
        steps=100000,
        runs=200,
        seed_base=0,
        estimators=DEFAULT_ESTIMATORS,
        start_state=0,
        first_checkpoint=100,
        checkpoints_per_decade=4,
        delta=0.1,
        rate_target=3,
        rate_counts=(100, 10000),
        jobs=1,
    ):
        self.gamma = check_discount(gamma)
        self.steps = int(steps)
        self.runs = int(runs)
        self.seed_base = check_seed(seed_base)
        self.estimators = tuple(estimators)
        self.start_state = int(start_state)
        self.first_checkpoint = int(first_checkpoint)
        self.checkpoints_per_decade = int(checkpoints_per_decade)
        self.delta = float(delta)
        self.rate_target = int(rate_target)
        self.rate_counts = (int(rate_counts[0]), int(rate_counts[1]))
        self.jobs = int(jobs)

        if self.steps < 1:
            raise ExperimentError("the horizon T must be positive")
        if self.runs < 1:
            raise ExperimentError("at least one run is needed")
        if self.jobs < 1:
            raise ExperimentError("jobs must be positive")
        if self.first_checkpoint < 1 or self.checkpoints_per_decade < 1:
            raise ExperimentError("checkpoint grid parameters must be positive")
        if not (1 <= self.rate_counts[0] <= self.rate_counts[1]):
            raise ExperimentError("loop count range must satisfy 1 <= min <= max")
        if not self.estimators:
            raise ExperimentError("no estimators selected")

    def to_dict(self):
        # jobs is left out: it never changes the results
        return OrderedDict(
            [
                ("gamma", self.gamma),
                ("steps", self.steps),
                ("runs", self.runs),
                ("seed_base", self.seed_base),
                ("estimators", [e.label for e in self.estimators]),
                ("start_state", state_label(self.start_state)),
                ("first_checkpoint", self.first_checkpoint),
                ("checkpoints_per_decade", self.checkpoints_per_decade),
                ("delta", self.delta),
                ("rate_target", state_label(self.rate_target)),
                ("rate_counts", list(self.rate_counts)),
            ]
        )


def checkpoint_grid(first, per_decade, last):
    """Geometric grid first, first * 10^(1/per_decade), ... ending exactly at last"""
    if last <= first:
        return [int(last)]
    grid = []
    base = math.log10(first)
    i = 0
    while True:
        c = int(round(10.0 ** (base + float(i) / per_decade)))
        if c >= last:
            break
        if not grid or c > grid[-1]:
            grid.append(c)
        i += 1
    grid.append(int(last))
    return grid


# -----------------
# Reports
# -----------------


Table = namedtuple("Table", ("header", "rows"))


class ExperimentReport(object):
    """Tables to write as CSV plus the metadata that goes to meta.json"""

    __slots__ = ("mode", "config", "values", "taus", "tables", "fit", "summary")

    def __init__(self, mode, config, values, taus, tables, fit, summary=None):
        self.mode = mode
        self.config = config
        self.values = values
        self.taus = taus
        self.tables = tables
        self.fit = fit
        self.summary = summary

    def meta(self):
        from .. import __version__

        meta = OrderedDict(
            [
                ("mode", self.mode),
                ("config", self.config.to_dict()),
                ("exact_values", [float(v) for v in self.values]),
                ("tau", [float(t) for t in self.taus]),
                ("fit", self.fit),
                ("version", __version__),
            ]
        )
        if self.summary is not None:
            meta["summary"] = self.summary
        return meta


# -----------------
# Per-run work
# -----------------


_Context = namedtuple("_Context", ("mrp", "config", "values", "scale", "worst"))


def _context(mrp, config):
    if not (0 <= config.start_state < mrp.num_states):
        raise ExperimentError("start state {0} outside the MRP".format(config.start_state))
    values = exact_values(mrp, config.gamma).values
    scale = float(values.max())
    if not scale > 0.0:
        raise ExperimentError("every exact value is zero, so errors cannot be normalized")
    worst = mrp.r_max / (1.0 - config.gamma)
    return _Context(mrp, config, values, scale, worst)


def _path(ctx, run_index):
    config = ctx.config
    return simulate(
        ctx.mrp, config.start_state, config.steps, run_seed(config.seed_base, run_index)
    )


def _tau_task(args):
    ctx, run_index = args
    path = _path(ctx, run_index)
    errors = np.empty(ctx.mrp.num_states)
    for s in range(ctx.mrp.num_states):
        stats = loop_statistics(path.states, path.rewards, s, ctx.config.gamma)
        if len(stats.discounts) == 0:
            _logger.warning(
                "run %d: no loop through %s, using the worst-case error",
                run_index,
                state_label(s),
            )
            errors[s] = ctx.worst
        else:
            errors[s] = abs(running_estimates(stats)[-1] - ctx.values[s])
    return errors / ctx.scale


def _loop_curve(ctx, path, checkpoints):
    errors = np.empty((ctx.mrp.num_states, len(checkpoints)))
    for s in range(ctx.mrp.num_states):
        stats = loop_statistics(path.states, path.rewards, s, ctx.config.gamma)
        running = running_estimates(stats)
        closed = loops_closed_by(stats, checkpoints)
        row = np.full(len(checkpoints), ctx.worst)
        seen = closed > 0
        row[seen] = np.abs(running[closed[seen] - 1] - ctx.values[s])
        errors[s] = row
        if not seen[-1]:
            _logger.warning(
                "no loop through %s by step %d, using the worst-case error",
                state_label(s),
                checkpoints[-1],
            )
    return errors.max(axis=0)


def _model_based_curve(ctx, path, checkpoints):
    estimator = ModelBasedEstimator(ctx.mrp.num_states)
    states, rewards = path.states, path.rewards
    errors = np.empty(len(checkpoints))
    done = 0
    for i, c in enumerate(checkpoints):
        # a prefix of c steps holds c - 1 transitions
        stop = max(done, c - 1)
        estimator.update_many(states[done:stop], rewards[done:stop], states[done + 1 : stop + 1])
        done = stop
        errors[i] = np.max(np.abs(estimator.estimate(ctx.config.gamma).values - ctx.values))
    return errors


def _td_curve(ctx, spec, path, checkpoints):
    estimator = TDEstimator(ctx.mrp.num_states, ctx.config.gamma, spec.k, spec.d)
    snapshots = estimator.run(path.states, path.rewards, checkpoints)
    return np.array([np.max(np.abs(v - ctx.values)) for v in snapshots])


def _comparison_task(args):
    ctx, run_index, checkpoints = args
    path = _path(ctx, run_index)
    curves = np.empty((len(ctx.config.estimators), len(checkpoints)))
    for i, spec in enumerate(ctx.config.estimators):
        if spec.kind == "loop":
            curves[i] = _loop_curve(ctx, path, checkpoints)
        elif spec.kind == "mb":
            curves[i] = _model_based_curve(ctx, path, checkpoints)
        else:
            curves[i] = _td_curve(ctx, spec, path, checkpoints)
    return curves / ctx.scale


def _rate_task(args):
    ctx, run_index, counts = args
    path = _path(ctx, run_index)
    target = ctx.config.rate_target
    stats = loop_statistics(path.states, path.rewards, target, ctx.config.gamma)
    running = running_estimates(stats)
    errors = np.full(len(counts), np.nan)
    reached = counts <= len(running)
    errors[reached] = np.abs(running[counts[reached] - 1] - ctx.values[target])
    return errors


# -----------------
# Summaries
# -----------------


def _std(samples, axis=0):
    if samples.shape[axis] < 2:
        return np.zeros(np.delete(samples.shape, axis))
    return np.std(samples, axis=axis, ddof=1)


def line_fit(x, y):
    """Least-squares line through (x, y) with its Pearson correlation"""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    ok = np.isfinite(x) & np.isfinite(y)
    x, y = x[ok], y[ok]
    if len(x) < 2 or np.ptp(x) == 0.0 or np.ptp(y) == 0.0:
        nan = float("nan")
        return OrderedDict([("slope", nan), ("intercept", nan), ("pearson_r", nan), ("r_squared", nan)])
    fit = linregress(x, y)
    return OrderedDict(
        [
            ("slope", float(fit.slope)),
            ("intercept", float(fit.intercept)),
            ("pearson_r", float(fit.rvalue)),
            ("r_squared", float(fit.rvalue) ** 2),
        ]
    )


def _taus(mrp):
    return np.array([hitting_profile(mrp, s).tau for s in range(mrp.num_states)])


# -----------------
# Experiments
# -----------------


def run_tau_experiment(config, mrp=None):
    """Final per-state error of the loop estimator against sqrt(tau_s)"""
    if mrp is None:
        mrp = build_riverswim()
    ctx = _context(mrp, config)
    taus = _taus(mrp)
    errors = np.array(
        map_runs(_tau_task, [(ctx, i) for i in range(config.runs)], config.jobs)
    )
    mean = errors.mean(axis=0)
    std = _std(errors)
    sqrt_tau = np.sqrt(taus)
    fit = line_fit(sqrt_tau, mean)
    _logger.info("tau experiment: pearson r = %g", fit["pearson_r"])

    rows = [
        (state_label(s), taus[s], sqrt_tau[s], mean[s], std[s])
        for s in range(mrp.num_states)
    ]
    tables = OrderedDict(
        [("tau.csv", Table(("state", "tau", "sqrt_tau", "mean_error", "std_error"), rows))]
    )
    return ExperimentReport("tau", config, ctx.values, taus, tables, fit)


def run_comparison(config, mrp=None):
    """Sup-norm error curves of every configured estimator on shared paths"""
    if mrp is None:
        mrp = build_riverswim()
    ctx = _context(mrp, config)
    taus = _taus(mrp)
    checkpoints = checkpoint_grid(config.first_checkpoint, config.checkpoints_per_decade, config.steps)
    curves = np.array(
        map_runs(
            _comparison_task,
            [(ctx, i, checkpoints) for i in range(config.runs)],
            config.jobs,
        )
    )

    labels = [e.label for e in config.estimators]
    rows = []
    for run in range(config.runs):
        for i, label in enumerate(labels):
            for j, step in enumerate(checkpoints):
                rows.append((run, label, step, curves[run, i, j]))

    mean = curves.mean(axis=0)
    std = _std(curves)
    summary = OrderedDict(
        [
            ("checkpoints", checkpoints),
            (
                "final",
                OrderedDict(
                    (label, OrderedDict([("mean", float(mean[i, -1])), ("std", float(std[i, -1]))]))
                    for (i, label) in enumerate(labels)
                ),
            ),
        ]
    )
    tables = OrderedDict(
        [("comparison.csv", Table(("run", "estimator", "step", "normalized_error"), rows))]
    )
    report = ExperimentReport("comparison", config, ctx.values, taus, tables, None, summary)
    report.summary["mean"] = mean.tolist()
    report.summary["std"] = std.tolist()
    return report


def run_rate_experiment(config, mrp=None):
    """Error of the loop estimate of one state after n loops, for a grid of n"""
    if mrp is None:
        mrp = build_riverswim()
    if not (0 <= config.rate_target < mrp.num_states):
        raise ExperimentError("target state {0} outside the MRP".format(config.rate_target))
    ctx = _context(mrp, config)
    taus = _taus(mrp)
    lo, hi = config.rate_counts
    counts = np.array(checkpoint_grid(lo, config.checkpoints_per_decade, hi), dtype=np.int64)
    errors = np.array(
        map_runs(_rate_task, [(ctx, i, counts) for i in range(config.runs)], config.jobs)
    ).reshape(config.runs, len(counts))

    reached = np.isfinite(errors)
    available = reached.sum(axis=0)
    if np.any(available < config.runs):
        _logger.warning(
            "some runs closed fewer than %d loops through %s; increase the horizon",
            counts[-1],
            state_label(config.rate_target),
        )
    rows = []
    means = np.full(len(counts), np.nan)
    for j, n in enumerate(counts):
        e = errors[reached[:, j], j]
        bound = visit_error_bound(int(n), config.gamma, mrp.r_max, config.delta)
        if len(e):
            means[j] = e.mean()
            std = float(np.std(e, ddof=1)) if len(e) > 1 else 0.0
            exceed = float(np.mean(e > bound))
        else:
            std = exceed = float("nan")
        rows.append((int(n), means[j], std, bound, exceed))

    fit = line_fit(np.log(counts), np.log(means))
    _logger.info("rate experiment: log-log slope = %g", fit["slope"])
    tables = OrderedDict(
        [("rate.csv", Table(("n", "mean_error", "std_error", "bound", "exceed_fraction"), rows))]
    )
    return ExperimentReport("rate", config, ctx.values, taus, tables, fit)


EXPERIMENTS = OrderedDict(
    [
        ("tau", run_tau_experiment),
        ("comparison", run_comparison),
        ("rate", run_rate_experiment),
    ]
)
