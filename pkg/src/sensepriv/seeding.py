"""Deterministic RNG sub-stream derivation.

Every randomized operation derives an independent generator from the
master seed plus a small integer path (domain tag, item indices). Results
are therefore reproducible and independent of worker count or execution
order.
"""

import numpy as np

DOMAIN_PRIVATIZE = 1
DOMAIN_PROXY = 2
DOMAIN_EVAL_PAIRS = 3
DOMAIN_EVAL_CONTEXT = 4
DOMAIN_INDUCE = 5
DOMAIN_QUERY_SAMPLE = 6

_MASK = (1 << 63) - 1


def substream(master_seed: int, *path: int) -> np.random.Generator:
    """Generator for the sub-stream identified by (master_seed, *path)."""
    entropy = [int(master_seed) & _MASK] + [int(p) & _MASK for p in path]
    return np.random.default_rng(entropy)


def derive_seed(master_seed: int, *path: int) -> int:
    """Stable integer seed derived from (master_seed, *path)."""
    entropy = [int(master_seed) & _MASK] + [int(p) & _MASK for p in path]
    return int(np.random.SeedSequence(entropy).generate_state(1, np.uint64)[0])
