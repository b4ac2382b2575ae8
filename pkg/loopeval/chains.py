"""Counterexample chains

``build_mk_chain`` gives a family whose expected recurrence time is always 2
while return times reach k, so no tail bound in terms of the recurrence time
alone can hold. ``build_transient_triple`` gives three MRPs that a single path
started in a transient state cannot tell apart.
"""

from collections import namedtuple

import numpy as np

from .mrp import MRP, Deterministic

TransientTriple = namedtuple("TransientTriple", ("top", "middle", "bottom"))


def build_mk_chain(k):
    """s1 stays with probability 1 - 1/(k-1), otherwise runs the cycle s2..sk"""
    if isinstance(k, bool) or int(k) != k or k < 3:
        raise ValueError("k must be an integer >= 3, got {0!r}".format(k))
    k = int(k)
    p = np.zeros((k, k))
    p[0, 0] = 1.0 - 1.0 / (k - 1)
    p[0, 1] = 1.0 / (k - 1)
    for i in range(1, k - 1):
        p[i, i + 1] = 1.0
    p[k - 1, 0] = 1.0
    return MRP(p, [Deterministic(0.0)] * k, 1.0)


def build_transient_triple():
    """The top, middle and bottom MRPs; state 0 is the transient start state

    top:    s1' -> s2 (absorbing, reward 1)
    middle: s1  -> s2 or s3 with probability 1/2 each (both absorbing)
    bottom: s1'' -> s3 (absorbing, reward 0)
    """
    top = MRP([[0.0, 1.0], [0.0, 1.0]], [Deterministic(0.0), Deterministic(1.0)], 1.0)
    middle = MRP(
        [[0.0, 0.5, 0.5], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
        [Deterministic(0.0), Deterministic(1.0), Deterministic(0.0)],
        1.0,
    )
    bottom = MRP([[0.0, 1.0], [0.0, 1.0]], [Deterministic(0.0), Deterministic(0.0)], 1.0)
    return TransientTriple(top, middle, bottom)
