"""Wasserstein-style objective: real scores up, synthetic scores down."""

from __future__ import annotations

from typing import TYPE_CHECKING

from src.contracts.algorithms import AdversarialObjective
from src.core.algorithms.registry import register
from src.core.autodiff import ops

if TYPE_CHECKING:
    from src.core.autodiff import Tensor


def mean_synthetic(synthetic: list[Tensor]) -> Tensor:
    total = synthetic[0]
    for scores in synthetic[1:]:
        total = total + scores
    return ops.scale(total, 1.0 / len(synthetic))


@register("wasserstein")
class WassersteinObjective(AdversarialObjective):
    """``sum(-F_real + mean(F_syn))`` for the critic, its negation for G."""

    def discriminator_loss(self, real: Tensor, synthetic: list[Tensor]) -> Tensor:
        return ops.sum(mean_synthetic(synthetic) - real)

    def generator_loss(self, real: Tensor, synthetic: list[Tensor]) -> Tensor:
        return ops.neg(self.discriminator_loss(real, synthetic))
