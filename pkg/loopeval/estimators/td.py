"""k-step temporal difference estimator

v(X_t) <- (1 - eta) v(X_t) + eta (R_t + ... + gamma^k R_{t+k} + gamma^{k+1} v(X_{t+k+1}))

with eta = N_t(X_t)^-d, N_t counting visits to X_t up to and including t.
Every estimate starts at 0. An update needs X_{t+k+1}, so the last k + 1
steps of a finite path never issue one.
"""

import logging

import numpy as np
import scipy.signal

from ..mrp import ValueVector, check_discount

_logger = logging.getLogger(__name__)


class TDEstimator(object):
    __slots__ = ("_gamma", "_k", "_d", "_values", "_visit_counts", "_kernel", "_bootstrap")

    def __init__(self, num_states, gamma, k=0, d=1.0):
        if isinstance(k, bool) or int(k) != k or k < 0:
            raise ValueError("lookahead k must be a non-negative integer, got {0!r}".format(k))
        d = float(d)
        if not (0.5 <= d <= 1.0):
            raise ValueError("learning-rate exponent d must lie in [0.5, 1], got {0!r}".format(d))
        self._gamma = check_discount(gamma)
        self._k = int(k)
        self._d = d
        self._values = [0.0] * int(num_states)
        self._visit_counts = [0] * int(num_states)
        self._kernel = self._gamma ** np.arange(self._k + 1, dtype=np.float64)
        self._bootstrap = self._gamma ** (self._k + 1)

    @property
    def gamma(self):
        return self._gamma

    @property
    def k(self):
        return self._k

    @property
    def d(self):
        return self._d

    @property
    def estimates(self):
        return np.array(self._values, dtype=np.float64)

    @property
    def visit_counts(self):
        return np.array(self._visit_counts, dtype=np.int64)

    @property
    def window(self):
        """Number of path steps one update looks at"""
        return self._k + 2

    def value_vector(self):
        return ValueVector(self._values, self._gamma)

    def _update(self, x, ret, x_boot):
        c = self._visit_counts[x] + 1
        self._visit_counts[x] = c
        eta = c ** -self._d
        old = self._values[x]
        self._values[x] = (1.0 - eta) * old + eta * (ret + self._bootstrap * self._values[x_boot])

    def step(self, states, rewards):
        """One update from the window (X_t, ..., X_{t+k+1}), (R_t, ..., R_{t+k})"""
        k = self._k
        if len(states) < k + 2 or len(rewards) < k + 1:
            raise ValueError("a TD({0}) update needs {1} steps of path".format(k, k + 2))
        ret = float(np.dot(self._kernel, np.asarray(rewards[: k + 1], dtype=np.float64)))
        self._update(int(states[0]), ret, int(states[k + 1]))

    def run(self, states, rewards, checkpoints=()):
        """Consume a whole path, returning the estimates after each checkpoint

        A checkpoint c is a path prefix of c steps; it sees every update whose
        window ends inside the prefix, which is max(0, c - k - 1) of them.
        """
        states = np.asarray(states, dtype=np.int64)
        rewards = np.asarray(rewards, dtype=np.float64)
        k = self._k
        total = max(0, len(states) - k - 1)
        if total:
            returns = scipy.signal.correlate(
                rewards[: len(states) - 1], self._kernel, mode="valid", method="direct"
            ).tolist()
        else:
            returns = []
        xs = states.tolist()

        snapshots = []
        done = 0
        for c in checkpoints:
            stop = min(total, max(0, int(c) - k - 1))
            for t in range(done, stop):
                self._update(xs[t], returns[t], xs[t + k + 1])
            done = max(done, stop)
            snapshots.append(self.estimates)
        for t in range(done, total):
            self._update(xs[t], returns[t], xs[t + k + 1])
        _logger.debug("TD(%d) d=%g: %d updates", k, self._d, total)
        return snapshots
