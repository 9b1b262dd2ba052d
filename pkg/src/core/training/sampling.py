"""Uniform corruption of positive triples."""

from __future__ import annotations

import numpy as np

from src.contracts.errors import DataError


def negative_sample(
    positives: np.ndarray,
    k: int,
    n_entities: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """Corrupt each positive ``k`` times by replacing its head or tail.

    The side is a fair coin per negative; the replacement is uniform over
    every entity except the one it replaces. Corruptions are not filtered
    against known triples.

    Args:
        positives: (B, 3) id triples.
        k: Negatives per positive.
        n_entities: Size of the entity vocabulary.
        rng: Source of randomness; consumed in a fixed order.

    Returns:
        (B, k, 3) int64 array.

    Raises:
        DataError: If fewer than two entities exist.
    """
    if n_entities < 2:
        msg = f"negative sampling needs at least 2 entities, found {n_entities}"
        raise DataError(msg)
    positives = np.asarray(positives, dtype=np.int64).reshape(-1, 3)
    b = len(positives)
    corrupt_head = rng.random((b, k)) < 0.5
    replacement = rng.integers(0, n_entities - 1, size=(b, k))
    negatives = np.repeat(positives[:, None, :], k, axis=1)
    original = np.where(corrupt_head, negatives[:, :, 0], negatives[:, :, 2])
    replacement = replacement + (replacement >= original)
    negatives[:, :, 0] = np.where(corrupt_head, replacement, negatives[:, :, 0])
    negatives[:, :, 2] = np.where(corrupt_head, negatives[:, :, 2], replacement)
    return negatives
