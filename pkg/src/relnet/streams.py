"""Seed derivation.

Every random stream is a pure function of an integer key tuple, hashed with
numpy's SeedSequence, so results never depend on evaluation order or the
number of worker threads.  The first key element is the master seed and the
second a purpose tag.
"""

import numpy as np

DEFAULT_SEED = 20190101

INIT = 1
UPDATE = 2
FITNESS = 3
PREDICT = 4
RUN = 5
FOLD = 6
SHUFFLE = 7


def derive_seed(*key: int) -> int:
    return int(np.random.SeedSequence([int(k) for k in key]).generate_state(1, np.uint64)[0])


def stream(*key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(k) for k in key]))
