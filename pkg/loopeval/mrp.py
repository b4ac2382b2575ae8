"""Finite Markov reward processes: definition, validation, simulation, values"""

import logging
from bisect import bisect_right
from collections import namedtuple

import numpy as np

from .utils.linalg import SingularError, row_cdf, solve
from .utils.rng import check_seed, make_rng

_logger = logging.getLogger(__name__)

_ROW_SUM_ATOL = 1e-12


class MRPError(Exception):
    pass


class InvalidMRPError(MRPError):
    def __init__(self, violations):
        self.violations = tuple(violations)
        MRPError.__init__(
            self, "; ".join(str(v) for v in self.violations) or "invalid MRP"
        )


class DiscountError(MRPError, ValueError):
    pass


class SingularSystemError(MRPError):
    pass


# -----------------
# Rewards
# -----------------


class Deterministic(object):
    """A reward that always pays ``mean``"""

    __slots__ = ("_mean",)

    kind = "deterministic"

    def __init__(self, mean):
        self._mean = float(mean)

    @property
    def mean(self):
        return self._mean

    @property
    def support(self):
        return (self._mean, self._mean)

    # sampled as Bernoulli(1, mean): a uniform draw in [0, 1) is always < 1
    @property
    def probability(self):
        return 1.0

    @property
    def magnitude(self):
        return self._mean

    def to_dict(self):
        return {"type": self.kind, "mean": self._mean}

    def __eq__(self, other):
        return isinstance(other, Deterministic) and other._mean == self._mean

    def __hash__(self):
        return hash((self.kind, self._mean))

    def __repr__(self):
        return "Deterministic({0!r})".format(self._mean)


class Bernoulli(object):
    """A reward of ``magnitude`` with probability ``p`` and 0 otherwise"""

    __slots__ = ("_p", "_magnitude")

    kind = "bernoulli"

    def __init__(self, p, magnitude):
        self._p = float(p)
        self._magnitude = float(magnitude)

    @property
    def mean(self):
        return self._p * self._magnitude

    @property
    def support(self):
        if self._p <= 0.0:
            return (0.0, 0.0)
        if self._p >= 1.0:
            return (self._magnitude, self._magnitude)
        return (min(0.0, self._magnitude), max(0.0, self._magnitude))

    @property
    def probability(self):
        return self._p

    @property
    def magnitude(self):
        return self._magnitude

    def to_dict(self):
        return {"type": self.kind, "p": self._p, "magnitude": self._magnitude}

    def __eq__(self, other):
        return (
            isinstance(other, Bernoulli)
            and other._p == self._p
            and other._magnitude == self._magnitude
        )

    def __hash__(self):
        return hash((self.kind, self._p, self._magnitude))

    def __repr__(self):
        return "Bernoulli({0!r}, {1!r})".format(self._p, self._magnitude)


# -----------------
# MRP
# -----------------


class Violation(namedtuple("Violation", ("kind", "index", "detail"))):
    __slots__ = ()

    def __str__(self):
        return "{0} {1}: {2}".format(self.kind, self.index, self.detail)


def _frozen(a):
    a = np.array(a, dtype=np.float64)
    a.setflags(write=False)
    return a


class MRP(object):
    """A finite Markov reward process

    Construction only checks shapes; ``validate`` reports the semantic
    invariants (stochastic rows, reward supports inside [0, r_max]).
    """

    __slots__ = ("_transitions", "_rewards", "_r_max")

    def __init__(self, transitions, rewards, r_max):
        p = _frozen(transitions)
        if p.ndim != 2 or p.shape[0] != p.shape[1]:
            raise MRPError("transitions must be a square matrix, got shape {0}".format(p.shape))
        rewards = tuple(rewards)
        if len(rewards) != p.shape[0]:
            raise MRPError(
                "expected {0} reward specs, got {1}".format(p.shape[0], len(rewards))
            )
        for r in rewards:
            if not isinstance(r, (Deterministic, Bernoulli)):
                raise MRPError("unsupported reward distribution {0!r}".format(r))
        self._transitions = p
        self._rewards = rewards
        self._r_max = float(r_max)

    @property
    def num_states(self):
        return self._transitions.shape[0]

    @property
    def transitions(self):
        return self._transitions

    @property
    def rewards(self):
        return self._rewards

    @property
    def r_max(self):
        return self._r_max

    def __eq__(self, other):
        return (
            isinstance(other, MRP)
            and np.array_equal(self._transitions, other._transitions)
            and self._rewards == other._rewards
            and self._r_max == other._r_max
        )

    def __hash__(self):
        return hash((self._transitions.tobytes(), self._rewards, self._r_max))

    def __repr__(self):
        return "MRP(num_states={0}, r_max={1!r})".format(self.num_states, self._r_max)


class SamplePath(object):
    """A seeded realization (X_t, R_t) for 0 <= t < T"""

    __slots__ = ("_states", "_rewards", "_seed", "_start_state")

    def __init__(self, states, rewards, seed, start_state):
        states = np.array(states, dtype=np.int64)
        rewards = np.array(rewards, dtype=np.float64)
        if states.shape != rewards.shape or states.ndim != 1:
            raise MRPError("states and rewards must be 1-d and of equal length")
        states.setflags(write=False)
        rewards.setflags(write=False)
        self._states = states
        self._rewards = rewards
        self._seed = seed
        self._start_state = int(start_state)

    @property
    def states(self):
        return self._states

    @property
    def rewards(self):
        return self._rewards

    @property
    def seed(self):
        return self._seed

    @property
    def start_state(self):
        return self._start_state

    def __len__(self):
        return len(self._states)

    def __iter__(self):
        return zip(self._states.tolist(), self._rewards.tolist())

    def prefix(self, length):
        return SamplePath(
            self._states[:length], self._rewards[:length], self._seed, self._start_state
        )


class ValueVector(object):
    """Discounted state values v(s) for one discount factor"""

    __slots__ = ("_values", "_gamma")

    def __init__(self, values, gamma):
        self._values = _frozen(values)
        self._gamma = float(gamma)

    @property
    def values(self):
        return self._values

    @property
    def gamma(self):
        return self._gamma

    def __len__(self):
        return len(self._values)

    def __getitem__(self, index):
        return float(self._values[index])

    def __iter__(self):
        return iter(self._values.tolist())

    def max(self):
        return float(self._values.max())

    def __repr__(self):
        return "ValueVector({0}, gamma={1!r})".format(self._values.tolist(), self._gamma)


# -----------------
# Operations
# -----------------


def check_discount(gamma):
    gamma = float(gamma)
    if not (0.0 <= gamma < 1.0):
        raise DiscountError("discount must lie in [0, 1), got {0!r}".format(gamma))
    return gamma


def validate(mrp):
    """Return the list of invariant violations; an empty list means valid"""
    violations = []
    p = mrp.transitions
    if mrp.num_states < 1:
        violations.append(Violation("num_states", 0, "an MRP needs at least one state"))
    if not np.isfinite(mrp.r_max) or mrp.r_max <= 0.0:
        violations.append(Violation("r_max", 0, "r_max must be positive, got {0!r}".format(mrp.r_max)))
    for i in range(mrp.num_states):
        row = p[i]
        if not np.all(np.isfinite(row)):
            violations.append(Violation("row", i, "non-finite transition probability"))
            continue
        negative = np.flatnonzero(row < 0.0)
        if len(negative):
            violations.append(
                Violation(
                    "row",
                    i,
                    "negative probability at column {0}".format(int(negative[0])),
                )
            )
        total = float(row.sum())
        if abs(total - 1.0) > _ROW_SUM_ATOL:
            violations.append(Violation("row", i, "sums to {0!r}".format(total)))
    for i, reward in enumerate(mrp.rewards):
        low, high = reward.support
        if isinstance(reward, Bernoulli) and not (0.0 <= reward.probability <= 1.0):
            violations.append(
                Violation("reward", i, "probability {0!r} outside [0, 1]".format(reward.probability))
            )
        if low < 0.0 or high > mrp.r_max or not np.isfinite(high):
            violations.append(
                Violation(
                    "reward",
                    i,
                    "{0!r} has support outside [0, {1!r}]".format(reward, mrp.r_max),
                )
            )
    return violations


def check_valid(mrp):
    violations = validate(mrp)
    if violations:
        raise InvalidMRPError(violations)
    return mrp


def mean_rewards(mrp):
    return np.array([r.mean for r in mrp.rewards], dtype=np.float64)


def exact_values(mrp, gamma):
    """Solve the Bellman equation (I - gamma P) v = r for the exact values"""
    gamma = check_discount(gamma)
    r = mean_rewards(mrp)
    if gamma == 0.0:
        return ValueVector(r, gamma)
    a = np.eye(mrp.num_states) - gamma * mrp.transitions
    try:
        v = solve(a, r)
    except SingularError as e:
        raise SingularSystemError(str(e))
    # clip rounding noise outside the a-priori range
    v = np.clip(v, 0.0, mrp.r_max / (1.0 - gamma))
    return ValueVector(v, gamma)


def bellman_residual(mrp, values):
    v = values.values
    return float(
        np.max(np.abs(v - mean_rewards(mrp) - values.gamma * mrp.transitions.dot(v)))
    )


class _Sampler(object):
    """Per-MRP tables for inverse-transform sampling"""

    __slots__ = ("cdf_rows", "reward_p", "reward_magnitude")

    def __init__(self, mrp):
        self.cdf_rows = [row.tolist() for row in row_cdf(mrp.transitions)]
        self.reward_p = np.array([r.probability for r in mrp.rewards], dtype=np.float64)
        self.reward_magnitude = np.array(
            [r.magnitude for r in mrp.rewards], dtype=np.float64
        )

    def rewards(self, states, uniforms):
        return np.where(
            uniforms < self.reward_p[states], self.reward_magnitude[states], 0.0
        )


def _check_state(mrp, state, name):
    if isinstance(state, bool) or not isinstance(state, (int, np.integer)):
        raise MRPError("{0} must be a state index, got {1!r}".format(name, state))
    if not (0 <= state < mrp.num_states):
        raise MRPError(
            "{0} {1} outside [0, {2})".format(name, state, mrp.num_states)
        )
    return int(state)


def simulate(mrp, start_state, steps, seed):
    """Draw a sample path of exactly ``steps`` steps starting in ``start_state``

    Two uniform streams of length ``steps`` are drawn up front from the
    Philox stream of ``seed``: one drives transitions through the row CDFs,
    the other realizes rewards. The result is a pure function of the inputs.
    """
    start_state = _check_state(mrp, start_state, "start state")
    steps = int(steps)
    if steps < 1:
        raise MRPError("path length must be positive, got {0}".format(steps))
    seed = check_seed(seed)

    rng = make_rng(seed)
    move = rng.random(steps).tolist()
    pay = rng.random(steps)

    sampler = _Sampler(mrp)
    cdf_rows = sampler.cdf_rows
    states = [0] * steps
    x = start_state
    for t in range(steps):
        states[t] = x
        x = bisect_right(cdf_rows[x], move[t])
    states = np.array(states, dtype=np.int64)
    rewards = sampler.rewards(states, pay)
    _logger.debug("simulated %d steps from state %d (seed %d)", steps, start_state, seed)
    return SamplePath(states, rewards, seed, start_state)


def monte_carlo_values(mrp, gamma, rollouts, horizon, seed):
    """Truncated-horizon rollout estimate of v with per-state standard errors

    All rollouts of one start state advance together as a vector, so the cost
    is ``num_states * horizon`` numpy steps.
    """
    gamma = check_discount(gamma)
    rollouts = int(rollouts)
    horizon = int(horizon)
    if rollouts < 2 or horizon < 1:
        raise MRPError("need at least two rollouts and a positive horizon")

    rng = make_rng(seed)
    cdf = row_cdf(mrp.transitions)
    sampler = _Sampler(mrp)
    num_states = mrp.num_states
    means = np.empty(num_states)
    errors = np.empty(num_states)
    for start in range(num_states):
        x = np.full(rollouts, start, dtype=np.int64)
        total = np.zeros(rollouts)
        discount = 1.0
        for _ in range(horizon):
            total += discount * sampler.rewards(x, rng.random(rollouts))
            discount *= gamma
            u = rng.random(rollouts)
            x = (cdf[x] <= u[:, None]).sum(axis=1)
        means[start] = total.mean()
        errors[start] = total.std(ddof=1) / np.sqrt(rollouts)
    return means, errors
