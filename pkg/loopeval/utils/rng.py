"""Seeded random streams

Every random draw in the package comes from a Philox counter-based generator
(``numpy.random.Philox``, 4x64 with 10 rounds). Its output for a given key is
specified independently of the platform, so a seed reproduces a path bit for
bit everywhere numpy runs. Independent replications use ``seed + run_index``.
"""

import numpy as np

_SEED_MASK = (1 << 64) - 1


class SeedError(ValueError):
    pass


def check_seed(seed):
    if isinstance(seed, (bool, np.bool_)) or not isinstance(seed, (int, np.integer)):
        raise SeedError("seed must be an integer, got {0!r}".format(seed))
    seed = int(seed)
    if seed < 0 or seed > _SEED_MASK:
        raise SeedError("seed must fit in 64 unsigned bits, got {0}".format(seed))
    return seed


def make_rng(seed):
    return np.random.Generator(np.random.Philox(key=check_seed(seed)))


def run_seed(seed_base, run_index):
    return (check_seed(seed_base) + run_index) & _SEED_MASK
