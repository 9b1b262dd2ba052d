"""Adversarial objectives for the min-max training game."""

from src.core.algorithms import vanilla_gan, wasserstein  # noqa: F401  (registers objectives)
from src.core.algorithms.registry import ObjectiveRegistry

__all__ = ["ObjectiveRegistry"]
