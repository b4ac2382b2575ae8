"""Closed-form concentration and error bounds for the loop estimator

All bounds carry their explicit constants, so they can be evaluated and
compared against simulation.
"""

import math

_E = math.e


class PreconditionViolation(ValueError):
    pass


def _positive(name, x):
    x = float(x)
    if not (x > 0.0) or math.isinf(x):
        raise PreconditionViolation("{0} must be positive and finite, got {1!r}".format(name, x))
    return x


def _count(name, n):
    if isinstance(n, bool) or not math.isfinite(n) or int(n) != n or n < 1:
        raise PreconditionViolation("{0} must be a positive integer, got {1!r}".format(name, n))
    return int(n)


def _discount(gamma):
    gamma = float(gamma)
    if not (0.0 <= gamma < 1.0):
        raise PreconditionViolation("discount must lie in [0, 1), got {0!r}".format(gamma))
    return gamma


def _probability(delta, allow_one=False):
    delta = float(delta)
    ok = 0.0 < delta <= 1.0 if allow_one else 0.0 < delta < 1.0
    if not ok:
        raise PreconditionViolation("delta {0!r} outside its domain".format(delta))
    return delta


def _prefactor(gamma, r_max):
    return _positive("r_max", r_max) / (1.0 - _discount(gamma)) ** 2


def return_time_tail_bound(tau, t):
    """P[H_s+ >= t] <= e * exp(-t / (e tau)), clamped to [0, 1]"""
    tau = _positive("tau", tau)
    t = _positive("t", t)
    return min(1.0, max(0.0, _E * math.exp(-t / (_E * tau))))


def waiting_time_bound(n, tau, delta):
    """With probability 1 - delta the n-th visit happens before this step"""
    n = _count("n", n)
    tau = _positive("tau", tau)
    delta = _probability(delta, allow_one=True)
    return _E * n * tau * math.log(_E * n / delta)


def visit_error_bound(n, gamma, r_max, delta):
    """Error of the loop estimate after n loops, with probability 1 - delta"""
    n = _count("n", n)
    delta = _probability(delta)
    return _prefactor(gamma, r_max) * math.sqrt(math.log(4.0 / delta) / (2.0 * n))


def _check_horizon(steps, tau, delta):
    if not steps > _E * delta * tau:
        raise PreconditionViolation(
            "T={0!r} must exceed e * delta * tau = {1!r}".format(steps, _E * delta * tau)
        )


def step_error_bound(steps, tau, gamma, r_max, delta):
    """Error of the last loop estimate of a state after T steps"""
    steps = _count("T", steps)
    tau = _positive("tau", tau)
    delta = _probability(delta)
    prefactor = _prefactor(gamma, r_max)
    _check_horizon(steps, tau, delta)
    inner = (
        _E * tau * math.log(steps / (delta * tau)) * math.log(4.0 / delta) / (2.0 * steps)
    )
    return prefactor * math.sqrt(inner)


def all_states_error_bound(steps, tau_max, tau_min, num_states, gamma, r_max, delta):
    """Sup-norm error of one loop estimator per state after T steps"""
    steps = _count("T", steps)
    tau_max = _positive("tau_max", tau_max)
    tau_min = _positive("tau_min", tau_min)
    if tau_min > tau_max:
        raise PreconditionViolation("tau_min exceeds tau_max")
    num_states = _count("S", num_states)
    delta = _probability(delta)
    prefactor = _prefactor(gamma, r_max)
    _check_horizon(steps, tau_max, delta)
    inner = (
        _E
        * tau_max
        * math.log(num_states * steps / (delta * tau_min))
        * math.log(4.0 * num_states / delta)
        / (2.0 * steps)
    )
    return prefactor * math.sqrt(inner)
