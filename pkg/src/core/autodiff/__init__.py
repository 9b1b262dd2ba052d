"""Dense float64 tensors with reverse-mode automatic differentiation."""

from src.core.autodiff import ops
from src.core.autodiff.gradcheck import grad_check, param_grad_check
from src.core.autodiff.tensor import Node, Tape, Tensor, as_tensor, backward

__all__ = [
    "Node",
    "Tape",
    "Tensor",
    "as_tensor",
    "backward",
    "grad_check",
    "ops",
    "param_grad_check",
]
