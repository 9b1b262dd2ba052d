"""Stdout logging for the CLI commands.

Library modules log under ``src.*`` through ``logging.getLogger(__name__)``
and never attach handlers; the CLI wires one stdout handler onto the
library root and one onto ``native.<command>``.
"""

from __future__ import annotations

import logging
import os
import sys

LIBRARY_LOGGER = "src"
LEVEL_ENV = "NATIVE_LOG_LEVEL"

_FORMAT = "%(asctime)s | %(levelname)-8s | %(name)s | %(message)s"
_DATE_FORMAT = "%Y-%m-%d %H:%M:%S"


def resolve_level(level: int | str | None = None) -> int:
    """Turn a level name or number into a logging level.

    ``None`` falls back to ``$NATIVE_LOG_LEVEL`` and then INFO. Unknown
    names also give INFO.
    """
    if level is None:
        level = os.environ.get(LEVEL_ENV, "INFO")
    if isinstance(level, int):
        return level
    value = logging.getLevelName(level.strip().upper())
    return value if isinstance(value, int) else logging.INFO


def setup_logger(name: str = "native", level: int | str | None = None) -> logging.Logger:
    """Attach a stdout handler to ``name`` once and return the logger.

    Args:
        name: Logger name.
        level: Level name or number; see :func:`resolve_level`.

    Returns:
        The configured logger. A second call only updates its level.
    """
    resolved = resolve_level(level)
    logger = logging.getLogger(name)
    logger.setLevel(resolved)
    if logger.handlers:
        return logger

    handler = logging.StreamHandler(sys.stdout)
    handler.setFormatter(logging.Formatter(fmt=_FORMAT, datefmt=_DATE_FORMAT))
    logger.addHandler(handler)
    return logger


def setup_command_logging(command: str, level: int | str | None = None) -> logging.Logger:
    """Route library and command logs to stdout; return ``native.<command>``."""
    setup_logger(LIBRARY_LOGGER, level)
    return setup_logger(f"native.{command}", level)
