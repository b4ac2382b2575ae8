"""Hitting times, recurrence and the return-time identity for finite chains"""

import logging
from bisect import bisect_right
from collections import namedtuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import breadth_first_order

from .mrp import MRP, mean_rewards, check_discount
from .utils.linalg import SingularError, row_cdf, solve
from .utils.rng import make_rng

_logger = logging.getLogger(__name__)

_RETURN_CHUNK = 1 << 16


class UnreachableError(Exception):
    """Some states never reach the target, so its hitting times are infinite"""

    def __init__(self, target, states):
        self.target = target
        self.states = tuple(states)
        Exception.__init__(
            self,
            "state {0} is unreachable from states {1}".format(
                target, ", ".join(str(s) for s in self.states)
            ),
        )


class SingularMatrixError(Exception):
    pass


def _matrix(p):
    if isinstance(p, MRP):
        return p.transitions
    p = np.asarray(p, dtype=np.float64)
    if p.ndim != 2 or p.shape[0] != p.shape[1]:
        raise ValueError("expected a square transition matrix, got shape {0}".format(p.shape))
    return p


def _check_target(p, s):
    if isinstance(s, bool) or not isinstance(s, (int, np.integer)):
        raise ValueError("target must be a state index, got {0!r}".format(s))
    if not (0 <= s < p.shape[0]):
        raise ValueError("target {0} outside [0, {1})".format(s, p.shape[0]))
    return int(s)


def unreachable_states(p, s):
    """States with no path to ``s`` on the support graph of ``p``"""
    p = _matrix(p)
    reverse = csr_matrix((p > 0.0).T.astype(np.int8))
    reaching = breadth_first_order(reverse, s, directed=True, return_predecessors=False)
    mask = np.ones(p.shape[0], dtype=bool)
    mask[reaching] = False
    return np.flatnonzero(mask).tolist()


class HittingProfile(object):
    """Expected first-return times E_{s'}[H_s+] to one target state"""

    __slots__ = ("_target", "_expected_hitting")

    def __init__(self, target, expected_hitting):
        h = np.array(expected_hitting, dtype=np.float64)
        h.setflags(write=False)
        self._target = target
        self._expected_hitting = h

    @property
    def target(self):
        return self._target

    @property
    def expected_hitting(self):
        return self._expected_hitting

    @property
    def tau(self):
        """Maximal expected hitting time over all starting states"""
        return float(self._expected_hitting.max())

    @property
    def rho(self):
        """Expected recurrence time of the target"""
        return float(self._expected_hitting[self._target])

    def __repr__(self):
        return "HittingProfile(target={0}, tau={1!r}, rho={2!r})".format(
            self._target, self.tau, self.rho
        )


def hitting_profile(p, s):
    """Solve h[x] = 1 + sum_{y != s} P[x, y] h[y] for every x

    Reachability of ``s`` is checked on the support graph first: a system
    that is numerically solvable can still describe infinite hitting times.
    """
    p = _matrix(p)
    s = _check_target(p, s)
    missing = unreachable_states(p, s)
    if missing:
        raise UnreachableError(s, missing)
    a = np.eye(p.shape[0]) - p
    a[:, s] += p[:, s]
    try:
        h = solve(a, np.ones(p.shape[0]))
    except SingularError as e:
        raise UnreachableError(s, ()) from e
    return HittingProfile(s, h)


def first_return_matrix(p):
    """Y with Y[x, s] = E_x[H_s+] for every pair of states"""
    p = _matrix(p)
    n = p.shape[0]
    y = np.empty((n, n))
    for s in range(n):
        y[:, s] = hitting_profile(p, s).expected_hitting
    return y


def recover_transitions(y):
    """Invert Y = P (Y - diag Y + E) for the transition matrix P"""
    y = np.asarray(y, dtype=np.float64)
    if y.ndim != 2 or y.shape[0] != y.shape[1]:
        raise ValueError("expected a square matrix of return times")
    b = y - np.diag(np.diag(y)) + 1.0
    # P B = Y  <=>  B^T P^T = Y^T
    try:
        return solve(b.T, y.T).T
    except SingularError as e:
        raise SingularMatrixError(str(e))


def stationary_distribution(p, tol=1e-13, max_iter=100000):
    """Power iteration on the lazy chain (I + P) / 2

    The lazy chain has the same stationary distribution and is aperiodic, so
    the iteration also converges for periodic chains.
    """
    p = _matrix(p)
    n = p.shape[0]
    lazy = 0.5 * (np.eye(n) + p)
    pi = np.full(n, 1.0 / n)
    for i in range(max_iter):
        nxt = pi.dot(lazy)
        nxt /= nxt.sum()
        if np.max(np.abs(nxt - pi)) <= tol:
            _logger.debug("power iteration converged after %d steps", i + 1)
            return nxt
        pi = nxt
    _logger.warning("power iteration did not reach tolerance %g", tol)
    return pi


LoopMoments = namedtuple("LoopMoments", ("alpha", "beta", "residual_mass", "budget"))


def loop_moments(mrp, s, gamma, horizon=60):
    """Expected loop discount and loop discounted reward by mass propagation

    The mass of the chain started in ``s`` is pushed forward one step at a
    time and removed once it returns to ``s``; this sums over every
    excursion of length at most ``horizon``. ``budget`` bounds how far
    v(s) - beta - alpha v(s) can be from zero because of the truncation.
    """
    gamma = check_discount(gamma)
    p = mrp.transitions
    s = _check_target(p, s)
    r = mean_rewards(mrp)

    q = np.zeros(mrp.num_states)
    q[s] = 1.0
    alpha = 0.0
    beta = r[s]
    discount = 1.0
    for _ in range(horizon):
        q = q.dot(p)
        discount *= gamma
        alpha += discount * q[s]
        q[s] = 0.0
        beta += discount * q.dot(r)
    residual = float(q.sum())
    tail = residual * discount * gamma
    budget = 2.0 * tail * mrp.r_max / (1.0 - gamma)
    return LoopMoments(float(alpha), float(beta), residual, budget)


def sample_return_times(mrp, s, count, seed):
    """Draw ``count`` consecutive first-return times to ``s`` starting in ``s``"""
    p = mrp.transitions
    s = _check_target(p, s)
    missing = unreachable_states(p, s)
    if missing:
        raise UnreachableError(s, missing)

    cdf_rows = [row.tolist() for row in row_cdf(p)]
    rng = make_rng(seed)
    out = np.empty(int(count), dtype=np.int64)
    n = 0
    x = s
    length = 0
    while n < count:
        for u in rng.random(_RETURN_CHUNK).tolist():
            x = bisect_right(cdf_rows[x], u)
            length += 1
            if x == s:
                out[n] = length
                n += 1
                length = 0
                if n == count:
                    break
    return out


def waiting_times(states, s):
    """W_n(s) for n = 1, 2, ...: the step of the n-th visit to ``s``"""
    return np.flatnonzero(np.asarray(states) == s)
