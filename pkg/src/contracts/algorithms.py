"""Adversarial objective protocol for swappable min-max games."""

from __future__ import annotations

from abc import ABC, abstractmethod
from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from src.core.autodiff import Tensor


class AdversarialObjective(ABC):
    """Turns critic scores into discriminator and generator losses.

    ``real`` holds one score per positive, shape (B,). ``synthetic`` is
    a list of (B,) score tensors, one per synthetic triple or entity,
    averaged per positive.
    """

    @abstractmethod
    def discriminator_loss(self, real: Tensor, synthetic: list[Tensor]) -> Tensor:
        """Loss minimised by the critic (the KGC model)."""
        ...

    @abstractmethod
    def generator_loss(self, real: Tensor, synthetic: list[Tensor]) -> Tensor:
        """Loss minimised by the generator, before the gradient penalty."""
        ...
