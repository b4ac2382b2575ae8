"""Subcommands of the ``loopeval`` program"""

import logging
import os.path
from collections import OrderedDict, namedtuple

from ..analysis import UnreachableError, hitting_profile
from ..bounds import (
    PreconditionViolation,
    all_states_error_bound,
    step_error_bound,
    visit_error_bound,
    waiting_time_bound,
)
from ..chains import build_mk_chain, build_transient_triple
from ..estimators import LoopEstimator, ModelBasedEstimator, NoLoopsYet, TDEstimator
from ..experiments import (
    EXPERIMENTS,
    ExperimentConfig,
    build_riverswim,
    parse_estimators,
    write_report,
)
from ..experiments.report import OutputExistsError, check_outputs, dump_csv, write_csv
from ..mrp import InvalidMRPError, check_discount, exact_values, simulate, validate
from ..mrpfile import MRPFormatError, read_mrp
from ..utils.rng import check_seed
from ..utils.text import format_float, format_rounded, parse_int, parse_list, state_label
from .error import EXIT_OK, CommandParser, UsageError, ValidationFailed

_logger = logging.getLogger(__name__)

BUILTIN_PREFIX = "builtin:"

Command = namedtuple("Command", ("name", "func", "parser", "summary"))


def add_common_options(parser):
    parser.add_option("--debug", action="store_true", default=False, help="Enable debug logging")
    parser.add_option("--verbose", action="store_true", default=False, help="Log progress")
    parser.add_option("--config", metavar="PATH", help="Read settings from PATH")


# -----------------
# Argument conversion
# -----------------


def builtin_mrp(name):
    """``riverswim``, ``mk:<k>`` or ``transient:<top|middle|bottom>``"""
    if name == "riverswim":
        return build_riverswim()
    if name.startswith("mk:"):
        try:
            return build_mk_chain(parse_int(name[3:]))
        except ValueError as e:
            raise UsageError("bad builtin {0!r}: {1}".format(BUILTIN_PREFIX + name, e))
    if name.startswith("transient:"):
        part = name[len("transient:") :]
        triple = build_transient_triple()
        if part in triple._fields:
            return getattr(triple, part)
    raise UsageError("unknown builtin MRP {0!r}".format(BUILTIN_PREFIX + name))


def load_mrp_arg(ref, check=True):
    if ref.startswith(BUILTIN_PREFIX):
        return builtin_mrp(ref[len(BUILTIN_PREFIX) :])
    try:
        return read_mrp(ref, check=check)
    except InvalidMRPError as e:
        raise ValidationFailed(e.violations)
    except MRPFormatError as e:
        raise UsageError("{0}: {1}".format(ref, e))
    except (OSError, UnicodeDecodeError) as e:
        raise UsageError("cannot read {0}: {1}".format(ref, getattr(e, "strerror", None) or e))


def _single_mrp(parser, args, check=True):
    if len(args) != 1:
        raise UsageError("expected exactly one MRP file", parser.get_usage().strip())
    return load_mrp_arg(args[0], check=check)


def _convert(value, conv, flag):
    try:
        return conv(value)
    except ValueError as e:
        raise UsageError("bad value for {0}: {1!r} ({2})".format(flag, value, e))


def _state(text, mrp, flag):
    """A state given 0-based (``3``) or by its label (``s4``)"""
    t = text.strip()
    try:
        index = int(t[1:]) - 1 if t[:1] in ("s", "S") else int(t)
    except ValueError:
        raise UsageError("bad state for {0}: {1!r}".format(flag, text))
    if not (0 <= index < mrp.num_states):
        raise UsageError(
            "state {0!r} for {1} outside the {2} states of the MRP".format(text, flag, mrp.num_states)
        )
    return index


def _gamma(options, config):
    if options.gamma is None:
        return _convert(config.get_float("defaults", "gamma"), check_discount, "gamma")
    return _convert(options.gamma, check_discount, "--gamma")


def _probability(text):
    delta = float(text)
    if not (0.0 < delta < 1.0):
        raise ValueError("must lie strictly between 0 and 1")
    return delta


def _delta(options, config):
    if options.delta is None:
        return _convert(config.get_float("defaults", "delta"), _probability, "delta")
    return _convert(options.delta, _probability, "--delta")


def _int_option(options, name, config, key=None):
    value = getattr(options, name)
    if value is None:
        return config.get_int("defaults", key or name)
    return _convert(value, parse_int, "--" + name)


def _seed(options, config):
    return _convert(_int_option(options, "seed", config), check_seed, "--seed")


def _refuse_existing(path, force):
    if os.path.exists(path) and not force:
        raise UsageError("refusing to overwrite {0} (use --force)".format(path))


def _rows(out, header, rows):
    out.write("\t".join(header) + "\n")
    for row in rows:
        out.write("\t".join(v if isinstance(v, str) else format_float(v) for v in row) + "\n")


# -----------------
# validate
# -----------------


def _validate_parser():
    p = CommandParser(prog="loopeval validate", usage="%prog <mrp.json>")
    add_common_options(p)
    return p


def cmd_validate(parser, options, args, config, out):
    mrp = _single_mrp(parser, args, check=False)
    violations = validate(mrp)
    if violations:
        raise ValidationFailed(violations)
    out.write("valid: {0} states\n".format(mrp.num_states))
    return EXIT_OK


# -----------------
# exact
# -----------------


def _exact_parser():
    p = CommandParser(prog="loopeval exact", usage="%prog <mrp.json> --gamma G")
    add_common_options(p)
    p.add_option("--gamma", metavar="G", help="Discount factor in [0, 1)")
    return p


def cmd_exact(parser, options, args, config, out):
    mrp = _single_mrp(parser, args)
    values = exact_values(mrp, _gamma(options, config))
    for s, v in enumerate(values):
        out.write("{0} {1}\n".format(state_label(s), format_rounded(v)))
    return EXIT_OK


# -----------------
# simulate
# -----------------


def _simulate_parser():
    p = CommandParser(
        prog="loopeval simulate",
        usage="%prog <mrp.json> --start S --steps T --seed N [--out path.csv] [--force]",
    )
    add_common_options(p)
    p.add_option("--start", metavar="S", default="0", help="Start state (0-based or sN)")
    p.add_option("--steps", metavar="T", help="Path length")
    p.add_option("--seed", metavar="N", help="Random seed")
    p.add_option("--out", metavar="PATH", help="Write the path to PATH instead of stdout")
    p.add_option("--force", action="store_true", default=False, help="Overwrite PATH")
    return p


def cmd_simulate(parser, options, args, config, out):
    mrp = _single_mrp(parser, args)
    if options.force and not options.out:
        raise UsageError("--force only applies together with --out", parser.get_usage().strip())
    start = _state(options.start, mrp, "--start")
    steps = _int_option(options, "steps", config)
    if steps < 1:
        raise UsageError("--steps must be positive")
    seed = _seed(options, config)
    if options.out:
        _refuse_existing(options.out, options.force)

    path = simulate(mrp, start, steps, seed)
    header = ("t", "state", "reward")
    rows = ((t, x, r) for (t, (x, r)) in enumerate(path))
    if options.out:
        write_csv(options.out, header, rows)
    else:
        dump_csv(out, header, rows)
    return EXIT_OK


# -----------------
# analyze
# -----------------


def _analyze_parser():
    p = CommandParser(
        prog="loopeval analyze",
        usage="%prog <mrp.json> [--target S] [--gamma G] [--delta D] "
        "[--visits N,...] [--horizons T,...]",
    )
    add_common_options(p)
    p.add_option("--target", metavar="S", help="Analyze one state and tabulate its bounds")
    p.add_option("--gamma", metavar="G", help="Discount factor in [0, 1)")
    p.add_option("--delta", metavar="D", help="Failure probability of the bounds")
    p.add_option("--visits", metavar="LIST", help="Loop counts n for the per-visit bounds")
    p.add_option("--horizons", metavar="LIST", help="Path lengths T for the per-step bounds")
    return p


def _all_taus(mrp):
    try:
        return [hitting_profile(mrp, s).tau for s in range(mrp.num_states)]
    except UnreachableError:
        return None


def _or_na(func, *args):
    try:
        return func(*args)
    except PreconditionViolation:
        return "n/a"


def cmd_analyze(parser, options, args, config, out):
    mrp = _single_mrp(parser, args)
    if options.target is None:
        for flag in ("gamma", "delta", "visits", "horizons"):
            if getattr(options, flag) is not None:
                raise UsageError(
                    "--{0} needs --target".format(flag), parser.get_usage().strip()
                )
        rows = []
        for s in range(mrp.num_states):
            profile = hitting_profile(mrp, s)
            rows.append((state_label(s), profile.rho, profile.tau))
        _rows(out, ("state", "rho", "tau"), rows)
        return EXIT_OK

    target = _state(options.target, mrp, "--target")
    gamma = _gamma(options, config)
    delta = _delta(options, config)
    if options.visits is None:
        visits = config.get_list("analyze", "visits", parse_int)
    else:
        visits = _convert(options.visits, lambda t: parse_list(t, parse_int), "--visits")
    if options.horizons is None:
        horizons = config.get_list("analyze", "horizons", parse_int)
    else:
        horizons = _convert(options.horizons, lambda t: parse_list(t, parse_int), "--horizons")

    profile = hitting_profile(mrp, target)
    _rows(
        out,
        ("state", "expected_hitting"),
        [(state_label(s), h) for (s, h) in enumerate(profile.expected_hitting)],
    )
    out.write("rho\t{0}\ntau\t{1}\n\n".format(format_float(profile.rho), format_float(profile.tau)))

    _rows(
        out,
        ("n", "waiting_time_bound", "visit_error_bound"),
        [
            (
                str(n),
                waiting_time_bound(n, profile.tau, delta),
                visit_error_bound(n, gamma, mrp.r_max, delta),
            )
            for n in visits
        ],
    )
    out.write("\n")

    taus = _all_taus(mrp)
    rows = []
    for steps in horizons:
        step = _or_na(step_error_bound, steps, profile.tau, gamma, mrp.r_max, delta)
        if taus is None:
            every = "n/a"
        else:
            every = _or_na(
                all_states_error_bound,
                steps,
                max(taus),
                min(taus),
                mrp.num_states,
                gamma,
                mrp.r_max,
                delta,
            )
        rows.append((str(steps), step, every))
    _rows(out, ("T", "step_error_bound", "all_states_error_bound"), rows)
    return EXIT_OK


# -----------------
# estimate
# -----------------


def _estimate_parser():
    p = CommandParser(
        prog="loopeval estimate",
        usage="%prog <mrp.json> --estimator loop|mb|td [--target S] --gamma G "
        "--steps T --seed N [--start S] [--k K --d D]",
    )
    add_common_options(p)
    p.add_option(
        "--estimator", type="choice", choices=("loop", "mb", "td"), help="loop, mb or td"
    )
    p.add_option("--target", metavar="S", help="State to estimate (required for loop)")
    p.add_option("--gamma", metavar="G", help="Discount factor in [0, 1)")
    p.add_option("--steps", metavar="T", help="Path length")
    p.add_option("--seed", metavar="N", help="Random seed")
    p.add_option("--start", metavar="S", default="0", help="Start state of the path")
    p.add_option("--k", metavar="K", help="TD lookahead depth")
    p.add_option("--d", metavar="D", help="TD learning-rate exponent in [0.5, 1]")
    return p


def cmd_estimate(parser, options, args, config, out):
    usage = parser.get_usage().strip()
    if options.estimator is None:
        raise UsageError("--estimator is required", usage)
    if options.estimator != "td" and (options.k is not None or options.d is not None):
        raise UsageError("--k and --d only apply to --estimator td", usage)
    if options.estimator == "loop" and options.target is None:
        raise UsageError("--estimator loop needs --target", usage)

    mrp = _single_mrp(parser, args)
    target = None if options.target is None else _state(options.target, mrp, "--target")
    start = _state(options.start, mrp, "--start")
    gamma = _gamma(options, config)
    steps = _int_option(options, "steps", config)
    if steps < 1:
        raise UsageError("--steps must be positive")
    seed = _seed(options, config)
    k = 0 if options.k is None else _convert(options.k, parse_int, "--k")
    d = 1.0 if options.d is None else _convert(options.d, float, "--d")

    if options.estimator == "td":
        try:
            td = TDEstimator(mrp.num_states, gamma, k, d)
        except ValueError as e:
            raise UsageError(str(e), usage)

    exact = exact_values(mrp, gamma)
    path = simulate(mrp, start, steps, seed)
    if options.estimator == "loop":
        estimator = LoopEstimator(target, gamma)
        estimator.observe_many(path.states, path.rewards)
        estimates = {target: estimator.estimate()}
        _logger.info("%d loops through %s", estimator.loop_count, state_label(target))
    elif options.estimator == "mb":
        estimator = ModelBasedEstimator(mrp.num_states)
        estimator.update_path(path.states, path.rewards)
        estimates = dict(enumerate(estimator.estimate(gamma)))
    else:
        td.run(path.states, path.rewards)
        estimates = dict(enumerate(td.estimates.tolist()))

    states = [target] if target is not None else range(mrp.num_states)
    rows = []
    for s in states:
        v = estimates[s]
        if v is NoLoopsYet:
            _logger.warning("no loop through %s closed within %d steps", state_label(s), steps)
            rows.append((state_label(s), "NoLoopsYet", exact[s], "n/a"))
        else:
            rows.append((state_label(s), v, exact[s], abs(v - exact[s])))
    _rows(out, ("state", "estimate", "exact", "error"), rows)
    return EXIT_OK


# -----------------
# experiment
# -----------------


_OUTPUTS = {"tau": "tau.csv", "comparison": "comparison.csv", "rate": "rate.csv"}


def _experiment_parser():
    p = CommandParser(
        prog="loopeval experiment",
        usage="%prog riverswim --mode tau|comparison|rate --gamma G --steps T "
        "--runs R --seed N --out-dir D [--jobs N] [--force]",
    )
    add_common_options(p)
    p.add_option(
        "--mode", type="choice", choices=tuple(EXPERIMENTS), help="tau, comparison or rate"
    )
    p.add_option("--gamma", metavar="G", help="Discount factor in [0, 1)")
    p.add_option("--steps", metavar="T", help="Path length of every run")
    p.add_option("--runs", metavar="R", help="Number of seeded runs")
    p.add_option("--seed", metavar="N", help="Seed of run 0; run i uses N + i")
    p.add_option("--out-dir", dest="out_dir", metavar="D", help="Directory for the reports")
    p.add_option("--jobs", metavar="N", help="Worker processes")
    p.add_option("--start", metavar="S", help="Start state of every path")
    p.add_option("--estimators", metavar="LIST", help="comparison: e.g. loop,mb,td(10,1)")
    p.add_option("--target", metavar="S", help="rate: state whose loops are counted")
    p.add_option("--delta", metavar="D", help="rate: failure probability of the bound")
    p.add_option("--force", action="store_true", default=False, help="Overwrite reports")
    return p


def cmd_experiment(parser, options, args, config, out):
    usage = parser.get_usage().strip()
    if args != ["riverswim"]:
        raise UsageError("the only experiment subject is 'riverswim'", usage)
    if options.mode is None:
        raise UsageError("--mode is required", usage)
    if options.out_dir is None:
        raise UsageError("--out-dir is required", usage)
    if options.estimators is not None and options.mode != "comparison":
        raise UsageError("--estimators only applies to --mode comparison", usage)
    if options.mode != "rate" and (options.target is not None or options.delta is not None):
        raise UsageError("--target and --delta only apply to --mode rate", usage)
    if os.path.exists(options.out_dir) and not os.path.isdir(options.out_dir):
        raise UsageError("{0} is not a directory".format(options.out_dir))

    mrp = build_riverswim()
    kwargs = dict(
        gamma=_gamma(options, config),
        steps=_int_option(options, "steps", config),
        runs=_int_option(options, "runs", config),
        seed_base=_seed(options, config),
        jobs=_int_option(options, "jobs", config),
        first_checkpoint=config.get_int("experiment", "first_checkpoint"),
        checkpoints_per_decade=config.get_int("experiment", "checkpoints_per_decade"),
        rate_counts=(
            config.get_int("experiment", "rate_counts_min"),
            config.get_int("experiment", "rate_counts_max"),
        ),
    )
    if options.start is not None:
        kwargs["start_state"] = _state(options.start, mrp, "--start")
    if options.estimators is not None:
        kwargs["estimators"] = _convert(options.estimators, parse_estimators, "--estimators")
    if options.mode == "rate":
        kwargs["delta"] = _delta(options, config)
        if options.target is not None:
            kwargs["rate_target"] = _state(options.target, mrp, "--target")
    try:
        experiment_config = ExperimentConfig(**kwargs)
    except ValueError as e:
        raise UsageError(str(e), usage)

    paths = [os.path.join(options.out_dir, name) for name in (_OUTPUTS[options.mode], "meta.json")]
    try:
        check_outputs(paths, options.force)
    except OutputExistsError as e:
        raise UsageError(str(e))

    report = EXPERIMENTS[options.mode](experiment_config, mrp)
    write_report(report, options.out_dir, force=True)

    if report.fit is not None:
        out.write(
            "".join("{0}\t{1}\n".format(k, format_float(v)) for (k, v) in report.fit.items())
        )
    if report.summary is not None:
        for label, final in report.summary["final"].items():
            out.write(
                "{0}\t{1}\t{2}\n".format(label, format_float(final["mean"]), format_float(final["std"]))
            )
    for path in paths:
        out.write("wrote {0}\n".format(path))
    return EXIT_OK


COMMANDS = OrderedDict(
    (c.name, c)
    for c in (
        Command("validate", cmd_validate, _validate_parser, "check an MRP file"),
        Command("exact", cmd_exact, _exact_parser, "exact state values"),
        Command("simulate", cmd_simulate, _simulate_parser, "draw a seeded sample path"),
        Command("analyze", cmd_analyze, _analyze_parser, "hitting times and bounds"),
        Command("estimate", cmd_estimate, _estimate_parser, "run one estimator on one path"),
        Command("experiment", cmd_experiment, _experiment_parser, "RiverSwim experiments"),
    )
)
