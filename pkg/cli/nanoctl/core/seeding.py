"""
Deterministic seed derivation

Every stochastic component receives an integer seed derived from the master
seed plus a tuple of integer keys (generation, individual, scenario, ...), so a
run is reproducible regardless of evaluation order or worker count.
"""

from typing import Optional

import numpy as np

# numba's per-thread generator takes a 32-bit seed
MAX_KERNEL_SEED = 2**32 - 1


def fresh_seed() -> int:
    """Draw a new master seed from OS entropy"""
    return int(np.random.SeedSequence().generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))


def derive_seed(master_seed: int, *keys: int) -> int:
    """Derive a 32-bit seed from the master seed and integer keys"""
    entropy = [int(master_seed) & 0xFFFFFFFFFFFFFFFF, *(int(k) for k in keys)]
    return int(np.random.SeedSequence(entropy).generate_state(1, dtype=np.uint32)[0])


def make_rng(master_seed: int, *keys: int) -> np.random.Generator:
    """Seeded numpy generator for the given key path"""
    entropy = [int(master_seed) & 0xFFFFFFFFFFFFFFFF, *(int(k) for k in keys)]
    return np.random.default_rng(np.random.SeedSequence(entropy))


def resolve_seed(seed: Optional[int]) -> int:
    """Return ``seed`` or a freshly drawn one when it is None"""
    return fresh_seed() if seed is None else int(seed)
