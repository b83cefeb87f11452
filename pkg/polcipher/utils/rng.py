"""
Counter-based random streams.

Every Monte-Carlo consumer derives its generator from a master seed and a
tuple of integer indices (experiment point, trial, shard...), so results do
not depend on how work is split across workers.
"""
import numpy as np


def stream(seed: int, *indices: int) -> np.random.Generator:
    """
    Build an independent generator for ``(seed, *indices)``.

    Args:
        seed: Master seed (non-negative 64-bit integer)
        *indices: Position of the consumer in the work decomposition

    Returns:
        Philox-backed numpy Generator
    """
    sequence = np.random.SeedSequence([int(seed), *(int(i) for i in indices)])
    return np.random.Generator(np.random.Philox(sequence))
