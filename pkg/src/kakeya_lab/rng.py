"""Seeded random generators used by every experiment.

All randomness goes through numpy's PCG64 bit generator so a run is a pure
function of its integer seed.
"""

import numpy as np

RNG_NAME = "PCG64"


def make_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(seed))
