"""Finite-difference oracles for the autodiff engine."""

from __future__ import annotations

from typing import TYPE_CHECKING

import numpy as np

from src.contracts.errors import NonFiniteError
from src.core.autodiff.tensor import Tape, Tensor, backward

if TYPE_CHECKING:
    from collections.abc import Callable, Iterable


def grad_check(
    f: Callable[[Tensor], Tensor],
    x: np.ndarray,
    eps: float = 1e-5,
) -> float:
    """Compare the analytic gradient of scalar ``f`` with central differences.

    Returns:
        max over coordinates of |analytic - numeric| / max(1, |numeric|).

    Raises:
        ValueError: If ``eps`` is outside [1e-7, 1e-3].
        NonFiniteError: If ``f`` is not finite near ``x``.
    """
    if not 1e-7 <= eps <= 1e-3:
        msg = f"eps must lie in [1e-7, 1e-3], got {eps}"
        raise ValueError(msg)
    x = np.array(x, dtype=np.float64)

    tape = Tape()
    out = f(tape.watch(x, "x"))
    if out.tape is None:
        analytic = np.zeros_like(x)
        _finite_scalar(out)
    else:
        analytic = backward(tape, out)["x"]

    def evaluate(point: np.ndarray) -> float:
        return _finite_scalar(f(Tensor(point)))

    numeric = _central_differences(evaluate, x, eps)
    return _max_relative_error(analytic, numeric)


def param_grad_check(
    build_loss: Callable[[Tape | None], Tensor],
    params: dict[str, np.ndarray],
    names: Iterable[str],
    eps: float = 1e-5,
) -> dict[str, float]:
    """Finite-difference check of a loss over named parameter arrays.

    ``build_loss(tape)`` must watch every array in ``params`` it reads when
    given a tape and read them as constants when given ``None``. Arrays are
    perturbed in place and restored.

    Returns:
        Max relative error per parameter name.
    """
    tape = Tape()
    analytic = backward(tape, build_loss(tape))
    errors: dict[str, float] = {}
    for name in names:
        array = params[name]

        def evaluate(point: np.ndarray, array: np.ndarray = array) -> float:
            saved = array.copy()
            array[...] = point
            try:
                return _finite_scalar(build_loss(None))
            finally:
                array[...] = saved

        numeric = _central_differences(evaluate, array.copy(), eps)
        errors[name] = _max_relative_error(analytic[name], numeric)
    return errors


def _central_differences(
    evaluate: Callable[[np.ndarray], float],
    x: np.ndarray,
    eps: float,
) -> np.ndarray:
    numeric = np.zeros_like(x)
    for i in np.ndindex(x.shape):
        plus, minus = x.copy(), x.copy()
        plus[i] += eps
        minus[i] -= eps
        numeric[i] = (evaluate(plus) - evaluate(minus)) / (2.0 * eps)
    return numeric


def _max_relative_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    if numeric.size == 0:
        return 0.0
    error = np.abs(analytic - numeric) / np.maximum(1.0, np.abs(numeric))
    return float(error.max())


def _finite_scalar(out: Tensor) -> float:
    value = out.item()
    if not np.isfinite(value):
        msg = "grad_check: function is not finite near the evaluation point"
        raise NonFiniteError(msg)
    return value
