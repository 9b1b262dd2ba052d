"""Registry of the loss families the critic and generator can play.

``wasserstein`` is the default game; ``vanilla_gan`` swaps in the
log-sigmoid losses when the ``vanilla_gan`` ablation flag is set.
"""

from __future__ import annotations

from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from src.contracts.algorithms import AdversarialObjective
    from src.contracts.config import AblationFlags

DEFAULT_OBJECTIVE = "wasserstein"
VANILLA_OBJECTIVE = "vanilla_gan"

_REGISTRY: dict[str, type[AdversarialObjective]] = {}


def register(name: str):
    """Class decorator adding an adversarial objective under ``name``.

    Raises:
        ValueError: If another class already holds ``name``.
    """

    def decorator(cls: type[AdversarialObjective]) -> type[AdversarialObjective]:
        existing = _REGISTRY.get(name)
        if existing is not None and existing is not cls:
            msg = f"objective '{name}' is already registered by {existing.__name__}"
            raise ValueError(msg)
        _REGISTRY[name] = cls
        return cls

    return decorator


class ObjectiveRegistry:
    """Name lookup for the critic/generator loss pairs."""

    @staticmethod
    def get(name: str) -> AdversarialObjective:
        """Instantiate the objective registered as ``name``.

        Raises:
            KeyError: If no objective is registered under ``name``.
        """
        if name not in _REGISTRY:
            available = ", ".join(sorted(_REGISTRY)) or "(none)"
            msg = f"Unknown adversarial objective '{name}'. Available: {available}"
            raise KeyError(msg)
        return _REGISTRY[name]()

    @staticmethod
    def for_flags(flags: AblationFlags) -> AdversarialObjective:
        """Objective selected by a run's ablation flags."""
        return ObjectiveRegistry.get(VANILLA_OBJECTIVE if flags.vanilla_gan else DEFAULT_OBJECTIVE)

    @staticmethod
    def available() -> list[str]:
        return sorted(_REGISTRY)
