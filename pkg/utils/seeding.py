"""
Seed derivation for independent, reproducible random streams.
"""

import numpy as np


def derive_seed(master_seed, *keys):
    """
    A 64-bit seed determined by the master seed and the integer keys.

    Used to give every network, budget draw and simulation run of an
    experiment its own stream, independent of execution order.
    """
    sequence = np.random.SeedSequence([int(master_seed), *(int(k) for k in keys)])
    return int(sequence.generate_state(1, dtype=np.uint64)[0])
