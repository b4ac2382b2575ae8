"""Small dense linear systems"""

import logging

import numpy as np
import scipy.linalg

_logger = logging.getLogger(__name__)


class SingularError(Exception):
    pass


def solve(a, b):
    """Solve ``a x = b`` by LU factorization with partial pivoting (LAPACK gesv)"""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    _logger.debug("solving dense system of size %d", a.shape[0])
    try:
        return scipy.linalg.solve(a, b, check_finite=True)
    except (np.linalg.LinAlgError, ValueError) as e:
        raise SingularError(str(e))


def row_cdf(p):
    """Per-row cumulative distributions for inverse-transform sampling

    The entry at the last positive probability of each row and everything
    after it are set to +inf, so a uniform draw in [0, 1) can never select a
    zero-probability state through rounding in the cumulative sum.
    """
    p = np.asarray(p, dtype=np.float64)
    cdf = np.cumsum(p, axis=1)
    for i in range(p.shape[0]):
        positive = np.flatnonzero(p[i] > 0.0)
        if len(positive):
            cdf[i, positive[-1] :] = np.inf
    return cdf
