"""Loop estimator: the value of one state from the loops through it

A loop is the stretch of the path between two consecutive visits to the
target. Its discount gamma^I and discounted reward G are i.i.d. across
loops, and v = beta + alpha v with alpha = E[gamma^I], beta = E[G], so
plugging in running means gives v_hat = beta_hat / (1 - alpha_hat).

Rewards before the first visit belong to no loop and are dropped, and so is
the loop still open at the end of the path.
"""

from collections import namedtuple

import numpy as np

from ..mrp import check_discount


class _NoLoopsYet(object):
    """No loop has closed yet, so there is nothing to estimate from"""

    __slots__ = ()

    def __bool__(self):
        return False

    def __repr__(self):
        return "NoLoopsYet"

    def __reduce__(self):
        return "NoLoopsYet"


NoLoopsYet = _NoLoopsYet()


class LoopEstimator(object):
    """Streaming loop estimator for a single target state

    The state is a fixed set of scalars whatever the size of the chain or
    the length of the path.
    """

    __slots__ = (
        "_target",
        "_gamma",
        "_alpha_hat",
        "_beta_hat",
        "_loop_count",
        "_in_loop",
        "_discount_power",
        "_loop_return",
    )

    def __init__(self, target, gamma):
        self._target = int(target)
        self._gamma = check_discount(gamma)
        self._alpha_hat = 0.0
        self._beta_hat = 0.0
        self._loop_count = 0
        self._in_loop = False
        self._discount_power = 1.0
        self._loop_return = 0.0

    @property
    def target(self):
        return self._target

    @property
    def gamma(self):
        return self._gamma

    @property
    def alpha_hat(self):
        return self._alpha_hat

    @property
    def beta_hat(self):
        return self._beta_hat

    @property
    def loop_count(self):
        return self._loop_count

    @property
    def in_loop(self):
        return self._in_loop

    @property
    def cur_discount_power(self):
        return self._discount_power

    @property
    def cur_loop_return(self):
        return self._loop_return

    def add_loop(self, loop_discount, loop_return):
        """Fold one completed loop into the running means"""
        n = self._loop_count + 1
        w = 1.0 / n
        self._alpha_hat = w * loop_discount + (1.0 - w) * self._alpha_hat
        self._beta_hat = w * loop_return + (1.0 - w) * self._beta_hat
        self._loop_count = n

    def observe(self, x, r):
        if x == self._target:
            if self._in_loop:
                self.add_loop(self._discount_power, self._loop_return)
            self._in_loop = True
            self._loop_return = r
            self._discount_power = self._gamma
        elif self._in_loop:
            self._loop_return += self._discount_power * r
            # underflows to 0.0 on very long loops, the limit of gamma^I
            self._discount_power *= self._gamma

    def observe_many(self, states, rewards):
        for x, r in zip(np.asarray(states).tolist(), np.asarray(rewards).tolist()):
            self.observe(x, r)

    def estimate(self):
        if self._loop_count < 1:
            return NoLoopsYet
        return self._beta_hat / (1.0 - self._alpha_hat)

    def __repr__(self):
        return "LoopEstimator(target={0}, gamma={1!r}, loops={2})".format(
            self._target, self._gamma, self._loop_count
        )


# -----------------
# Batch form
# -----------------


LoopStatistics = namedtuple(
    "LoopStatistics", ("visit_times", "lengths", "discounts", "returns")
)


def loop_statistics(states, rewards, target, gamma):
    """Per-loop lengths I_n, discounts gamma^I_n and discounted rewards G_n"""
    gamma = check_discount(gamma)
    states = np.asarray(states)
    rewards = np.asarray(rewards, dtype=np.float64)
    visits = np.flatnonzero(states == target)
    if len(visits) < 2:
        empty = np.zeros(0)
        return LoopStatistics(visits, np.zeros(0, dtype=np.int64), empty, empty)

    lengths = np.diff(visits)
    discounts = gamma ** lengths.astype(np.float64)
    first, last = visits[0], visits[-1]
    offsets = np.arange(first, last) - np.repeat(visits[:-1], lengths)
    weighted = gamma ** offsets.astype(np.float64) * rewards[first:last]
    returns = np.add.reduceat(weighted, visits[:-1] - first)
    return LoopStatistics(visits, lengths, discounts, returns)


def running_estimates(stats):
    """v_hat_n for n = 1..N from the first n loops"""
    n = np.arange(1, len(stats.discounts) + 1, dtype=np.float64)
    alpha = np.cumsum(stats.discounts) / n
    beta = np.cumsum(stats.returns) / n
    return beta / (1.0 - alpha)


def loops_closed_by(stats, lengths):
    """Number of loops completed within the first ``length`` steps of the path"""
    closing = stats.visit_times[1:]
    return np.searchsorted(closing, np.asarray(lengths) - 1, side="right")
