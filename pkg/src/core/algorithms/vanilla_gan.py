"""Logistic GAN objective used by the vanilla-GAN ablation.

Scores are squashed with a sigmoid and clipped away from 0 and 1 before
the logs are taken.
"""

from __future__ import annotations

from typing import TYPE_CHECKING

from src.contracts.algorithms import AdversarialObjective
from src.core.algorithms.registry import register
from src.core.algorithms.wasserstein import mean_synthetic
from src.core.autodiff import ops

if TYPE_CHECKING:
    from src.core.autodiff import Tensor

CLIP = 1e-7


def _probability(scores: Tensor) -> Tensor:
    return ops.clip(ops.sigmoid(scores), CLIP, 1.0 - CLIP)


@register("vanilla_gan")
class VanillaGanObjective(AdversarialObjective):
    """Cross-entropy critic with the non-saturating generator loss."""

    def discriminator_loss(self, real: Tensor, synthetic: list[Tensor]) -> Tensor:
        fake = mean_synthetic([ops.log(1.0 - _probability(s)) for s in synthetic])
        return ops.neg(ops.sum(ops.log(_probability(real)) + fake))

    def generator_loss(self, real: Tensor, synthetic: list[Tensor]) -> Tensor:
        return ops.neg(ops.sum(mean_synthetic([ops.log(_probability(s)) for s in synthetic])))
