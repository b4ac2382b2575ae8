"""Shared constants, hypothesis strategies and random chains for the tests"""

import numpy as np
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from loopeval.mrp import MRP, Bernoulli, Deterministic


@st.composite
def dense_chains(draw, min_states=1, max_states=6, low=0.1, high=1.0):
    """Row-stochastic matrices with every entry positive, hence irreducible"""
    n = draw(st.integers(min_states, max_states))
    w = draw(arrays(np.float64, (n, n), elements=st.floats(low, high)))
    return w / w.sum(axis=1, keepdims=True)


@st.composite
def rewards(draw, r_max=1.0):
    if draw(st.booleans()):
        return Deterministic(draw(st.floats(0.0, r_max)))
    return Bernoulli(draw(st.floats(0.0, 1.0)), draw(st.floats(0.0, r_max)))


@st.composite
def mrps(draw, min_states=1, max_states=8, low=0.0):
    """Valid MRPs; ``low`` = 0 allows zero entries and so reducible chains"""
    n = draw(st.integers(min_states, max_states))
    w = draw(arrays(np.float64, (n, n), elements=st.floats(low, 1.0)))
    w[:, 0] += 1e-3
    p = w / w.sum(axis=1, keepdims=True)
    return MRP(p, [draw(rewards()) for _ in range(n)], 1.0)


discounts = st.floats(0.0, 0.99)


def random_chain(rng, num_states, low=0.1):
    """Dense row-stochastic matrix with weights drawn from [low, 1]"""
    w = rng.uniform(low, 1.0, size=(num_states, num_states))
    return w / w.sum(axis=1, keepdims=True)


# maximal expected hitting times of RiverSwim, s1..s6
RIVERSWIM_TAUS = (
    752.857142857,
    237.142857143,
    68.5714285714,
    15.7142857143,
    17.530864197530864,
    22.51028806584362,
)

# expected recurrence times
RIVERSWIM_RHOS = (155.714285714, 51.9047619048, 17.3015873016, 5.76719576720, 1.92239858907, 4.48559670782)

RIVERSWIM_VALUES_09 = (
    0.5103213327,
    0.6993292338,
    1.0213426948,
    1.5069555872,
    2.2269582503,
    3.2917584900,
)
