import math

import numpy as np
import pytest

from helpers import RIVERSWIM_TAUS
from loopeval.analysis import hitting_profile, waiting_times
from loopeval.bounds import (
    PreconditionViolation,
    all_states_error_bound,
    return_time_tail_bound,
    step_error_bound,
    visit_error_bound,
    waiting_time_bound,
)
from loopeval.mrp import simulate
from loopeval.utils.rng import run_seed


def test_tail_bound_clamps_to_one():
    assert return_time_tail_bound(1.0, math.e) == 1.0


def test_tail_bound_value():
    t = 10.0 * math.e ** 2
    assert return_time_tail_bound(10.0, t) == pytest.approx(math.e * math.exp(-math.e))
    assert return_time_tail_bound(10.0, t) == pytest.approx(0.1793, abs=1e-4)
    assert return_time_tail_bound(10.0, 271.8) == pytest.approx(1.2353782e-4, rel=1e-6)


def test_waiting_time_bound_values():
    assert waiting_time_bound(1, 1.0, 1.0) == pytest.approx(math.e)
    assert waiting_time_bound(100, 10.0, 0.05) == pytest.approx(23379.676864, rel=1e-9)


def test_visit_error_bound_values():
    assert visit_error_bound(100, 0.9, 1.0, 0.05) == pytest.approx(14.802071873, rel=1e-9)
    assert visit_error_bound(400, 0.9, 1.0, 0.05) == pytest.approx(
        visit_error_bound(100, 0.9, 1.0, 0.05) / 2.0, rel=1e-14
    )
    # (1 - 0)^2 = 1 leaves r_max as the prefactor
    assert visit_error_bound(50, 0.0, 3.0, 0.1) == pytest.approx(
        3.0 * math.sqrt(math.log(40.0) / 100.0)
    )


def test_step_error_bound_fixture():
    assert step_error_bound(100000, 752, 0.9, 1.0, 0.05) == pytest.approx(59.429885336, rel=1e-9)


def test_step_error_bound_linear_in_r_max():
    a = step_error_bound(100000, 752, 0.9, 1.0, 0.05)
    b = step_error_bound(100000, 752, 0.9, 2.0, 0.05)
    assert b == pytest.approx(2.0 * a, rel=1e-14)


def test_step_error_bound_decreasing_past_its_maximum():
    tau = 15.0
    grid = np.unique(np.logspace(1.0, 7.0, 200).astype(int))
    values = np.array([step_error_bound(int(t), tau, 0.9, 1.0, 0.05) for t in grid])
    peak = int(np.argmax(values))
    assert np.all(np.diff(values[peak:]) < 0.0)


def test_step_error_bound_precondition():
    with pytest.raises(PreconditionViolation):
        step_error_bound(10, 752, 0.9, 1.0, 0.05)
    with pytest.raises(PreconditionViolation):
        step_error_bound(100000, 752, 1.0, 1.0, 0.05)
    with pytest.raises(PreconditionViolation):
        step_error_bound(100000, 752, 0.9, 1.0, 0.0)


def test_all_states_bound_single_state_matches_step_bound():
    a = all_states_error_bound(100000, 752, 752, 1, 0.9, 1.0, 0.05)
    b = step_error_bound(100000, 752, 0.9, 1.0, 0.05)
    assert a == pytest.approx(b, rel=1e-14)


def test_all_states_bound_nondecreasing_in_states():
    values = [all_states_error_bound(100000, 752, 15, s, 0.9, 1.0, 0.05) for s in range(1, 50)]
    assert all(b >= a for (a, b) in zip(values, values[1:]))


def test_all_states_bound_riverswim_fixture():
    assert all_states_error_bound(100000, 752, 15, 6, 0.9, 1.0, 0.05) == pytest.approx(
        92.611410578, rel=1e-9
    )
    bound = all_states_error_bound(100000, max(RIVERSWIM_TAUS), min(RIVERSWIM_TAUS), 6, 0.9, 1.0, 0.05)
    assert 90.0 < bound < 95.0


def test_all_states_bound_precondition():
    with pytest.raises(PreconditionViolation):
        all_states_error_bound(100, 752, 15, 6, 0.9, 1.0, 0.05)
    with pytest.raises(PreconditionViolation):
        all_states_error_bound(100000, 15, 752, 6, 0.9, 1.0, 0.05)


@pytest.mark.parametrize(
    "args",
    [(0, 1.0, 0.1), (1.5, 1.0, 0.1), (1, 0.0, 0.1), (1, 1.0, 1.5), (1, float("inf"), 0.1)],
)
def test_waiting_time_bound_preconditions(args):
    with pytest.raises(PreconditionViolation):
        waiting_time_bound(*args)


@pytest.mark.parametrize("count", [float("inf"), float("nan")])
def test_bounds_reject_non_finite_counts(count):
    with pytest.raises(PreconditionViolation):
        waiting_time_bound(count, 10.0, 0.1)
    with pytest.raises(PreconditionViolation):
        visit_error_bound(count, 0.9, 1.0, 0.1)
    with pytest.raises(PreconditionViolation):
        step_error_bound(count, 752, 0.9, 1.0, 0.05)
    with pytest.raises(PreconditionViolation):
        all_states_error_bound(count, 752, 15, 6, 0.9, 1.0, 0.05)


def test_bounds_nonnegative_and_continuous():
    xs = np.linspace(1.0, 50.0, 500)
    tails = np.array([return_time_tail_bound(10.0, t) for t in xs])
    assert np.all((tails >= 0.0) & (tails <= 1.0))
    assert np.max(np.abs(np.diff(tails))) < 0.01
    errs = np.array([visit_error_bound(100, g, 1.0, 0.1) for g in np.linspace(0.0, 0.9, 500)])
    assert np.all(errs >= 0.0)
    assert np.max(np.abs(np.diff(errs))) < 1.0


@pytest.mark.slow
def test_waiting_time_bound_coverage(riverswim):
    s, n, delta, runs = 3, 50, 0.1, 1000
    tau = hitting_profile(riverswim, s).tau
    bound = waiting_time_bound(n, tau, delta)
    steps = int(bound) + 1
    exceed = 0
    for run in range(runs):
        path = simulate(riverswim, 0, steps, run_seed(100, run))
        w = waiting_times(path.states, s)
        # the n-th visit is w[n - 1]; no n-th visit within the bound counts as a miss
        if len(w) < n or w[n - 1] >= bound:
            exceed += 1
    assert exceed <= delta * runs + 3 * math.sqrt(runs * delta * (1 - delta))
