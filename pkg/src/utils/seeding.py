"""Named random sub-streams derived from one user seed.

Every consumer of randomness asks for its own stream so that adding
draws in one place never shifts the numbers seen elsewhere.
"""

from __future__ import annotations

import numpy as np

STREAMS = {
    "init": 1,
    "init_generator": 2,
    "init_critic": 3,
    "negatives": 4,
    "noise": 5,
    "shuffle": 6,
    "perturb": 7,
    "missing": 8,
    "synth": 9,
    "report": 10,
}

_MASK64 = (1 << 64) - 1


def stream(seed: int, name: str, *keys: int) -> np.random.Generator:
    """Return the generator for sub-stream ``name`` under ``seed``.

    Args:
        seed: User seed, reduced to 64 bits.
        name: One of ``STREAMS``.
        keys: Extra non-negative integers that fork the stream further
            (an epoch, a modality index, an entity id).
    """
    if name not in STREAMS:
        available = ", ".join(sorted(STREAMS))
        msg = f"Unknown random stream '{name}'. Available: {available}"
        raise KeyError(msg)
    entropy = [seed & _MASK64, STREAMS[name], *keys]
    return np.random.default_rng(np.random.SeedSequence(entropy))


def epoch_stream(seed: int, name: str, epoch: int) -> np.random.Generator:
    """Per-epoch stream keyed by ``seed XOR epoch``."""
    return stream((seed & _MASK64) ^ epoch, name)
