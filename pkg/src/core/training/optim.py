"""Adam with phase wrapping for relation rotations."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np

from src.contracts.errors import NonFiniteError

if TYPE_CHECKING:
    from src.core.model.params import ModelParams

logger = logging.getLogger(__name__)

BETA1 = 0.9
BETA2 = 0.999
EPS = 1e-8
PHASE_NAMES = frozenset({"relation_phase"})


@dataclass
class AdamState:
    """First and second moments per parameter plus the step counter."""

    m: dict[str, np.ndarray] = field(default_factory=dict)
    v: dict[str, np.ndarray] = field(default_factory=dict)
    t: int = 0


def wrap_phase(theta: np.ndarray) -> np.ndarray:
    """Map angles into (-pi, pi]; values already inside are returned as-is."""
    outside = (theta <= -np.pi) | (theta > np.pi)
    if not outside.any():
        return theta
    wrapped = np.pi - np.mod(np.pi - theta, 2 * np.pi)
    return np.where(outside, wrapped, theta)


def adam_step(
    params: dict[str, np.ndarray],
    grads: dict[str, np.ndarray],
    state: AdamState,
    lr: float,
) -> dict[str, np.ndarray]:
    """Apply one bias-corrected Adam update in place.

    Only names present in ``grads`` are updated. Phase parameters are
    wrapped back into (-pi, pi] afterwards, which keeps every rotation
    on the unit circle.

    Raises:
        NonFiniteError: If any gradient is NaN or infinite.
    """
    for name, grad in grads.items():
        if not np.all(np.isfinite(grad)):
            msg = f"adam_step: non-finite gradient for '{name}'"
            raise NonFiniteError(msg)
    state.t += 1
    correction1 = 1.0 - BETA1**state.t
    correction2 = 1.0 - BETA2**state.t
    for name, grad in grads.items():
        m = state.m.get(name)
        v = state.v.get(name)
        if m is None:
            m = np.zeros_like(grad)
            v = np.zeros_like(grad)
        m = BETA1 * m + (1.0 - BETA1) * grad
        v = BETA2 * v + (1.0 - BETA2) * grad * grad
        state.m[name], state.v[name] = m, v
        update = lr * (m / correction1) / (np.sqrt(v / correction2) + EPS)
        value = params[name] - update
        if name in PHASE_NAMES:
            value = wrap_phase(value)
        params[name][...] = value
    return params


class Adam:
    """Adam bound to one parameter group of a model."""

    def __init__(self, params: ModelParams, group: str, lr: float) -> None:
        self.params = params
        self.group = group
        self.lr = lr
        self.names = frozenset(params.names(group))
        self.state = AdamState()

    def step(self, grads: dict[str, np.ndarray]) -> None:
        foreign = set(grads) - self.names
        if foreign:
            msg = f"gradients for parameters outside group '{self.group}': {sorted(foreign)}"
            raise ValueError(msg)
        adam_step(self.params.tensors, grads, self.state, self.lr)
