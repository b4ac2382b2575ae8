"""RiverSwim under the policy that always swims right"""

import numpy as np

from ..mrp import MRP, Deterministic

NUM_STATES = 6

# (down, stay, up) for the states in the middle of the river
_MIDDLE = (0.1, 0.6, 0.3)


def build_riverswim():
    p = np.zeros((NUM_STATES, NUM_STATES))
    p[0, 0] = 0.7
    p[0, 1] = 0.3
    down, stay, up = _MIDDLE
    for i in range(1, NUM_STATES - 1):
        p[i, i - 1] = down
        p[i, i] = stay
        p[i, i + 1] = up
    p[-1, -2] = 0.7
    p[-1, -1] = 0.3
    rewards = [Deterministic(0.0)] * (NUM_STATES - 1) + [Deterministic(1.0)]
    return MRP(p, rewards, 1.0)
