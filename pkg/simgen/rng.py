"""
Seeded random streams.

Every random draw in the simulation engine comes from a stream keyed by
(seed, replicate, role). Streams are Philox generators built from a
SeedSequence whose spawn key carries the replicate index and role, so two
keys never share state and a replicate produces the same numbers whether it
runs first, last, serially or on a worker thread.
"""

import numpy as np

ROLE_ERRORS = 0
ROLE_COVARIATE = 1
ROLE_GENOTYPE = 2
ROLE_TREATMENT = 3
ROLE_NOISE = 4
ROLE_SAMPLING = 5


def make_rng(seed):
    """Generator from an int, a (seed, *keys) tuple, or an existing Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, tuple):
        root, *keys = seed
        sequence = np.random.SeedSequence(int(root), spawn_key=tuple(int(k) for k in keys))
    else:
        sequence = np.random.SeedSequence(None if seed is None else int(seed))
    return np.random.Generator(np.random.Philox(sequence))


def substream(seed, replicate, role):
    return make_rng((seed, replicate, role))
