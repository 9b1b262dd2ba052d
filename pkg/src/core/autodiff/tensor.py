"""Tensors and the reverse-mode tape.

A ``Tensor`` is an immutable float64 array. Tensors created through
``Tape.watch`` or produced by primitives with at least one taped input
carry a reference to their tape and a node index; everything else is a
constant. Backward sweeps the tape in reverse insertion order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Any

import numpy as np

from src.contracts.errors import ShapeError

if TYPE_CHECKING:
    from collections.abc import Callable, Sequence

    VJP = Callable[[np.ndarray], "Sequence[np.ndarray | None]"]


class Tensor:
    """Dense row-major float64 array, optionally attached to a tape."""

    __slots__ = ("data", "index", "tape")
    __array_ufunc__ = None

    def __init__(
        self,
        data: Any,
        *,
        tape: Tape | None = None,
        index: int = -1,
    ) -> None:
        array = np.asarray(data, dtype=np.float64).view()
        array.flags.writeable = False
        self.data = array
        self.tape = tape
        self.index = index

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def requires_grad(self) -> bool:
        return self.tape is not None

    def item(self) -> float:
        if self.data.size != 1:
            raise ShapeError("item", self.shape, detail="tensor is not a scalar")
        return float(self.data.reshape(-1)[0])

    def numpy(self) -> np.ndarray:
        """Return a writable copy of the values."""
        return self.data.copy()

    def __len__(self) -> int:
        return self.data.shape[0]

    def __repr__(self) -> str:
        taped = f", tape_index={self.index}" if self.tape is not None else ""
        return f"Tensor(shape={self.shape}{taped})"

    def __add__(self, other: Any) -> Tensor:
        from src.core.autodiff import ops

        return ops.add(self, other)

    __radd__ = __add__

    def __sub__(self, other: Any) -> Tensor:
        from src.core.autodiff import ops

        return ops.sub(self, other)

    def __rsub__(self, other: Any) -> Tensor:
        from src.core.autodiff import ops

        return ops.sub(other, self)

    def __mul__(self, other: Any) -> Tensor:
        from src.core.autodiff import ops

        return ops.mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other: Any) -> Tensor:
        from src.core.autodiff import ops

        return ops.div(self, other)

    def __neg__(self) -> Tensor:
        from src.core.autodiff import ops

        return ops.neg(self)

    def __matmul__(self, other: Any) -> Tensor:
        from src.core.autodiff import ops

        return ops.matmul(self, other)


def as_tensor(value: Any) -> Tensor:
    """Wrap numbers and arrays as constant tensors; pass tensors through."""
    if isinstance(value, Tensor):
        return value
    return Tensor(value)


@dataclass
class Node:
    """One recorded operation."""

    op: str
    inputs: tuple[int, ...]
    value: np.ndarray
    vjp: VJP | None = None
    name: str | None = None


class Tape:
    """Ordered record of operations for one forward pass.

    Insertion order is a topological order: a node's inputs are always
    recorded before it. A tape is single-threaded; build one per batch.
    """

    def __init__(self) -> None:
        self.nodes: list[Node] = []
        self.leaves: dict[str, int] = {}

    def __len__(self) -> int:
        return len(self.nodes)

    def watch(self, value: Any, name: str) -> Tensor:
        """Register a differentiable leaf under ``name``."""
        if name in self.leaves:
            msg = f"leaf '{name}' already watched on this tape"
            raise ValueError(msg)
        array = np.array(value, dtype=np.float64)
        index = len(self.nodes)
        self.nodes.append(Node(op="leaf", inputs=(), value=array, name=name))
        self.leaves[name] = index
        return Tensor(array, tape=self, index=index)

    def record(
        self,
        op: str,
        inputs: Sequence[Tensor],
        value: np.ndarray,
        vjp: VJP,
    ) -> Tensor:
        """Append a node and return its output tensor."""
        parents = []
        for tensor in inputs:
            if tensor.tape is not None and tensor.tape is not self:
                msg = f"{op}: inputs come from different tapes"
                raise ValueError(msg)
            parents.append(tensor.index if tensor.tape is self else -1)
        index = len(self.nodes)
        self.nodes.append(Node(op=op, inputs=tuple(parents), value=value, vjp=vjp))
        return Tensor(value, tape=self, index=index)


def backward(tape: Tape, root: Tensor) -> dict[str, np.ndarray]:
    """Accumulate gradients of a scalar ``root`` into every watched leaf.

    Leaves with no path to the root receive zero gradients.

    Raises:
        ShapeError: If ``root`` is not a scalar.
        ValueError: If ``root`` does not belong to ``tape``.
    """
    if root.data.size != 1:
        raise ShapeError("backward", root.shape, detail="root must be a scalar")
    if root.tape is not tape:
        msg = "backward: root was not recorded on this tape"
        raise ValueError(msg)

    grads: list[np.ndarray | None] = [None] * len(tape.nodes)
    grads[root.index] = np.ones_like(root.data)

    for index in range(root.index, -1, -1):
        node = tape.nodes[index]
        grad = grads[index]
        if grad is None or node.vjp is None:
            continue
        for parent, parent_grad in zip(node.inputs, node.vjp(grad), strict=True):
            if parent < 0 or parent_grad is None:
                continue
            current = grads[parent]
            grads[parent] = parent_grad if current is None else current + parent_grad
        grads[index] = None

    result: dict[str, np.ndarray] = {}
    for name, index in tape.leaves.items():
        grad = grads[index]
        shape = tape.nodes[index].value.shape
        result[name] = np.zeros(shape) if grad is None else np.reshape(grad, shape)
    return result
