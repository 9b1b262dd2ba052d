"""Differentiable primitives.

Every primitive computes its forward value with numpy, checks that the
value is finite, and (when any input is taped) records an exact
vector-Jacobian product. Elementwise binary ops follow numpy
broadcasting; their gradients are summed back to each operand's shape.
"""

from __future__ import annotations

from typing import TYPE_CHECKING, Any

import numpy as np

from src.contracts.errors import NonFiniteError, ShapeError
from src.core.autodiff.tensor import Tensor, as_tensor

if TYPE_CHECKING:
    from collections.abc import Sequence

    from src.core.autodiff.tensor import VJP


def _emit(op: str, inputs: Sequence[Tensor], value: np.ndarray, vjp: VJP) -> Tensor:
    if not np.all(np.isfinite(value)):
        msg = f"{op}: non-finite output"
        raise NonFiniteError(msg)
    tape = next((t.tape for t in inputs if t.tape is not None), None)
    if tape is None:
        return Tensor(value)
    return tape.record(op, inputs, value, vjp)


def _broadcast(op: str, a: Tensor, b: Tensor) -> None:
    try:
        np.broadcast_shapes(a.shape, b.shape)
    except ValueError:
        raise ShapeError(op, a.shape, b.shape) from None


def _unbroadcast(grad: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    """Sum ``grad`` down to ``shape`` after numpy broadcasting."""
    extra = grad.ndim - len(shape)
    if extra > 0:
        grad = grad.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, size in enumerate(shape) if size == 1 and grad.shape[i] != 1)
    if axes:
        grad = grad.sum(axis=axes, keepdims=True)
    return grad.reshape(shape)


# --- elementwise arithmetic ---


def add(a: Any, b: Any) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _broadcast("add", a, b)
    return _emit(
        "add",
        (a, b),
        a.data + b.data,
        lambda g: (_unbroadcast(g, a.shape), _unbroadcast(g, b.shape)),
    )


def sub(a: Any, b: Any) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _broadcast("sub", a, b)
    return _emit(
        "sub",
        (a, b),
        a.data - b.data,
        lambda g: (_unbroadcast(g, a.shape), _unbroadcast(-g, b.shape)),
    )


def mul(a: Any, b: Any) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _broadcast("mul", a, b)
    return _emit(
        "mul",
        (a, b),
        a.data * b.data,
        lambda g: (
            _unbroadcast(g * b.data, a.shape),
            _unbroadcast(g * a.data, b.shape),
        ),
    )


def div(a: Any, b: Any) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _broadcast("div", a, b)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = a.data / b.data
    return _emit(
        "div",
        (a, b),
        out,
        lambda g: (
            _unbroadcast(g / b.data, a.shape),
            _unbroadcast(-g * out / b.data, b.shape),
        ),
    )


def neg(x: Any) -> Tensor:
    x = as_tensor(x)
    return _emit("neg", (x,), -x.data, lambda g: (-g,))


def scale(x: Any, factor: float) -> Tensor:
    """Multiply by a fixed real number."""
    x = as_tensor(x)
    factor = float(factor)
    return _emit("scale", (x,), x.data * factor, lambda g: (g * factor,))


def square(x: Any) -> Tensor:
    x = as_tensor(x)
    return _emit("square", (x,), x.data * x.data, lambda g: (2.0 * g * x.data,))


def sqrt(x: Any) -> Tensor:
    x = as_tensor(x)
    with np.errstate(invalid="ignore"):
        out = np.sqrt(x.data)
    return _emit("sqrt", (x,), out, lambda g: (g / (2.0 * out),))


# --- linear algebra and layout ---


def matmul(a: Any, b: Any) -> Tensor:
    """``a @ b`` with ``a`` of rank 1 or 2 and ``b`` of rank 2."""
    a, b = as_tensor(a), as_tensor(b)
    if a.ndim not in (1, 2) or b.ndim != 2 or a.shape[-1] != b.shape[0]:
        raise ShapeError("matmul", a.shape, b.shape)

    def vjp(g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        if a.ndim == 1:
            return g @ b.data.T, np.outer(a.data, g)
        return g @ b.data.T, a.data.T @ g

    return _emit("matmul", (a, b), a.data @ b.data, vjp)


def concat(tensors: Sequence[Any], axis: int = -1) -> Tensor:
    """Concatenate along the last axis by default."""
    parts = [as_tensor(t) for t in tensors]
    if not parts:
        raise ShapeError("concat", detail="nothing to concatenate")
    try:
        out = np.concatenate([p.data for p in parts], axis=axis)
    except ValueError:
        raise ShapeError("concat", *(p.shape for p in parts)) from None
    bounds = np.cumsum([p.shape[axis] for p in parts])[:-1]
    return _emit("concat", parts, out, lambda g: tuple(np.split(g, bounds, axis=axis)))


def split(x: Any, sizes: Sequence[int], axis: int = -1) -> list[Tensor]:
    """Split along the last axis into consecutive pieces of ``sizes``."""
    x = as_tensor(x)
    if int(np.sum(sizes)) != x.shape[axis] or any(s <= 0 for s in sizes):
        raise ShapeError("split", x.shape, detail=f"sizes {list(sizes)}")
    pieces = []
    start = 0
    for size in sizes:
        index = [slice(None)] * x.ndim
        index[axis] = slice(start, start + size)
        pieces.append(_slice(x, tuple(index)))
        start += size
    return pieces


def _slice(x: Tensor, index: tuple[slice, ...]) -> Tensor:
    def vjp(g: np.ndarray) -> tuple[np.ndarray]:
        full = np.zeros(x.shape)
        full[index] = g
        return (full,)

    return _emit("split", (x,), x.data[index].copy(), vjp)


def reshape(x: Any, shape: Sequence[int]) -> Tensor:
    x = as_tensor(x)
    try:
        out = x.data.reshape(shape)
    except ValueError:
        raise ShapeError("reshape", x.shape, tuple(shape)) from None
    return _emit("reshape", (x,), out, lambda g: (g.reshape(x.shape),))


def transpose(x: Any) -> Tensor:
    """Swap the two axes of a rank-2 tensor."""
    x = as_tensor(x)
    if x.ndim != 2:
        raise ShapeError("transpose", x.shape)
    return _emit("transpose", (x,), x.data.T.copy(), lambda g: (g.T,))


def take(x: Any, indices: Any) -> Tensor:
    """Gather rows (first axis) by integer index; gradients scatter-add."""
    x = as_tensor(x)
    idx = np.asarray(indices, dtype=np.int64)
    if idx.size and (idx.min() < 0 or idx.max() >= x.shape[0]):
        raise ShapeError("take", x.shape, idx.shape, detail="index out of range")

    def vjp(g: np.ndarray) -> tuple[np.ndarray]:
        full = np.zeros(x.shape)
        np.add.at(full, idx, g)
        return (full,)

    return _emit("take", (x,), x.data[idx], vjp)


def stop_gradient(x: Any) -> Tensor:
    """Detach from the tape: the result is a constant."""
    return Tensor(as_tensor(x).data)


# --- nonlinearities ---


def exp(x: Any) -> Tensor:
    x = as_tensor(x)
    with np.errstate(over="ignore"):
        out = np.exp(x.data)
    return _emit("exp", (x,), out, lambda g: (g * out,))


def log(x: Any) -> Tensor:
    x = as_tensor(x)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.log(x.data)
    return _emit("log", (x,), out, lambda g: (g / x.data,))


def tanh(x: Any) -> Tensor:
    x = as_tensor(x)
    out = np.tanh(x.data)
    return _emit("tanh", (x,), out, lambda g: (g * (1.0 - out * out),))


def relu(x: Any) -> Tensor:
    """Rectifier; the subgradient at exactly zero is zero."""
    x = as_tensor(x)
    mask = x.data > 0
    return _emit("relu", (x,), np.where(mask, x.data, 0.0), lambda g: (g * mask,))


def _sigmoid(values: np.ndarray) -> np.ndarray:
    return 0.5 * (1.0 + np.tanh(0.5 * values))


def sigmoid(x: Any) -> Tensor:
    x = as_tensor(x)
    out = _sigmoid(x.data)
    return _emit("sigmoid", (x,), out, lambda g: (g * out * (1.0 - out),))


def log_sigmoid(x: Any) -> Tensor:
    """``log(sigmoid(x))`` without overflow for large ``|x|``."""
    x = as_tensor(x)
    out = -np.logaddexp(0.0, -x.data)
    return _emit("log_sigmoid", (x,), out, lambda g: (g * _sigmoid(-x.data),))


def softmax(x: Any, axis: int = -1) -> Tensor:
    x = as_tensor(x)
    shifted = x.data - x.data.max(axis=axis, keepdims=True)
    weights = np.exp(shifted)
    out = weights / weights.sum(axis=axis, keepdims=True)

    def vjp(g: np.ndarray) -> tuple[np.ndarray]:
        return (out * (g - (g * out).sum(axis=axis, keepdims=True)),)

    return _emit("softmax", (x,), out, vjp)


def clip(x: Any, low: float, high: float) -> Tensor:
    """Clamp into ``[low, high]``; no gradient flows where clamped."""
    x = as_tensor(x)
    inside = (x.data >= low) & (x.data <= high)
    return _emit("clip", (x,), np.clip(x.data, low, high), lambda g: (g * inside,))


# --- reductions ---


def sum(x: Any, axis: int | None = None, keepdims: bool = False) -> Tensor:  # noqa: A001
    x = as_tensor(x)
    out = x.data.sum(axis=axis, keepdims=keepdims)

    def vjp(g: np.ndarray) -> tuple[np.ndarray]:
        if axis is not None and not keepdims:
            g = np.expand_dims(g, axis)
        return (np.broadcast_to(g, x.shape).copy(),)

    return _emit("sum", (x,), np.asarray(out), vjp)


def mean(x: Any, axis: int | None = None, keepdims: bool = False) -> Tensor:
    x = as_tensor(x)
    count = x.data.size if axis is None else x.shape[axis]
    return scale(sum(x, axis=axis, keepdims=keepdims), 1.0 / count)


def norm(x: Any, axis: int | None = None, keepdims: bool = False) -> Tensor:
    """Euclidean norm; reduces everything to a scalar when ``axis`` is None.

    The gradient at the zero vector is taken to be zero.
    """
    x = as_tensor(x)
    out = np.sqrt((x.data * x.data).sum(axis=axis, keepdims=keepdims))

    def vjp(g: np.ndarray) -> tuple[np.ndarray]:
        n = out
        if axis is not None and not keepdims:
            g = np.expand_dims(g, axis)
            n = np.expand_dims(n, axis)
        with np.errstate(divide="ignore", invalid="ignore"):
            unit = np.where(n > 0, x.data / np.where(n > 0, n, 1.0), 0.0)
        return (g * unit,)

    return _emit("norm", (x,), np.asarray(out), vjp)


# --- complex rotation ---


def rotate(h: Any, theta: Any) -> Tensor:
    """Rotate complex coordinates of ``h`` by phases ``theta``.

    The last axis of ``h`` holds real parts in its first half and
    imaginary parts in its second half; ``theta`` has half that length
    and broadcasts over leading axes.
    """
    h, theta = as_tensor(h), as_tensor(theta)
    half = h.shape[-1] // 2
    if h.shape[-1] % 2 or theta.shape[-1] != half:
        raise ShapeError("rotate", h.shape, theta.shape)
    try:
        np.broadcast_shapes(h.shape[:-1], theta.shape[:-1])
    except ValueError:
        raise ShapeError("rotate", h.shape, theta.shape) from None

    re, im = h.data[..., :half], h.data[..., half:]
    cos, sin = np.cos(theta.data), np.sin(theta.data)
    out_re = re * cos - im * sin
    out_im = re * sin + im * cos
    out = np.concatenate([out_re, out_im], axis=-1)

    def vjp(g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        g_re, g_im = g[..., :half], g[..., half:]
        grad_h = np.concatenate([g_re * cos + g_im * sin, g_im * cos - g_re * sin], axis=-1)
        grad_theta = g_im * out_re - g_re * out_im
        return (
            _unbroadcast(grad_h, h.shape),
            _unbroadcast(grad_theta, theta.shape),
        )

    return _emit("rotate", (h, theta), out, vjp)
