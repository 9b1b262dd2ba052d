"""Exception hierarchy shared by every package.

Each family maps onto one stable CLI exit code.
"""

from __future__ import annotations


class NativeError(Exception):
    """Base class for all toolkit errors."""

    exit_code = 1
    kind = "error"


class ConfigError(NativeError, ValueError):
    """Invalid configuration, flag, or argument."""

    exit_code = 2
    kind = "config"


class DataError(NativeError, ValueError):
    """Malformed or inconsistent dataset files."""

    exit_code = 3
    kind = "data"


class CheckpointError(DataError):
    """Missing, corrupt, or mismatched checkpoint."""

    kind = "checkpoint"


class ShapeError(NativeError, ValueError):
    """Operand shapes do not conform for a tensor primitive."""

    exit_code = 4
    kind = "shape"

    def __init__(self, op: str, *shapes: tuple[int, ...], detail: str = "") -> None:
        self.op = op
        self.shapes = shapes
        rendered = ", ".join(str(tuple(s)) for s in shapes)
        msg = f"{op}: incompatible shapes {rendered}"
        if detail:
            msg = f"{msg} ({detail})"
        super().__init__(msg)


class NonFiniteError(NativeError, ArithmeticError):
    """A forward value, loss, or gradient became NaN or infinite."""

    exit_code = 4
    kind = "numeric"
