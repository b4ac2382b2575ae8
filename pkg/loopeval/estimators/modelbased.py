"""Model-based estimator: solve the Bellman equation of the smoothed empirical model

P_hat[s, s'] = (1/S + C[s, s']) / (1 + N[s])
r_hat[s]     = (sum of rewards seen at s) / (1 + N[s])

Add-one smoothing keeps every row of P_hat a distribution, so the system is
well posed even before a state has been visited.
"""

import numpy as np

from ..mrp import SingularSystemError, ValueVector, check_discount
from ..utils.linalg import SingularError, solve


class ModelBasedEstimator(object):
    __slots__ = ("_num_states", "_transition_counts", "_visit_counts", "_reward_sums")

    def __init__(self, num_states):
        num_states = int(num_states)
        if num_states < 1:
            raise ValueError("need at least one state")
        self._num_states = num_states
        self._transition_counts = np.zeros((num_states, num_states), dtype=np.int64)
        self._visit_counts = np.zeros(num_states, dtype=np.int64)
        self._reward_sums = np.zeros(num_states, dtype=np.float64)

    @property
    def num_states(self):
        return self._num_states

    @property
    def transition_counts(self):
        return self._transition_counts.copy()

    @property
    def visit_counts(self):
        return self._visit_counts.copy()

    @property
    def reward_sums(self):
        return self._reward_sums.copy()

    def update(self, x, r, x_next):
        self._transition_counts[x, x_next] += 1
        self._visit_counts[x] += 1
        self._reward_sums[x] += r

    def update_many(self, states, rewards, next_states):
        """Count a batch of transitions (X_t, R_t, X_{t+1}) at once"""
        states = np.asarray(states, dtype=np.int64)
        next_states = np.asarray(next_states, dtype=np.int64)
        rewards = np.asarray(rewards, dtype=np.float64)
        n = self._num_states
        self._transition_counts += np.bincount(
            states * n + next_states, minlength=n * n
        ).reshape(n, n)
        self._visit_counts += np.bincount(states, minlength=n)
        self._reward_sums += np.bincount(states, weights=rewards, minlength=n)

    def update_path(self, states, rewards):
        """Every transition of a path; the reward of the last step has no successor"""
        states = np.asarray(states)
        self.update_many(states[:-1], np.asarray(rewards)[:-1], states[1:])

    def model(self):
        """The smoothed estimates (P_hat, r_hat)"""
        denom = 1.0 + self._visit_counts.astype(np.float64)
        p = (1.0 / self._num_states + self._transition_counts) / denom[:, None]
        r = self._reward_sums / denom
        return p, r

    def estimate(self, gamma):
        gamma = check_discount(gamma)
        p, r = self.model()
        if gamma == 0.0:
            return ValueVector(r, gamma)
        try:
            v = solve(np.eye(self._num_states) - gamma * p, r)
        except SingularError as e:
            raise SingularSystemError(str(e))
        return ValueVector(v, gamma)
