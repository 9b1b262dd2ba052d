"""Telemetry event contracts."""

from __future__ import annotations

from typing import Any

from pydantic import BaseModel, Field


class RunEvent(BaseModel):
    """Per-epoch training event.

    Carries no wall-clock timestamp so that a run directory is
    reproducible byte for byte.
    """

    run_id: str
    epoch: int = Field(ge=0)
    d_loss: float
    g_loss: float | None = None
    lr_d: float = Field(ge=0)
    lr_g: float | None = Field(default=None, ge=0)
    extras: dict[str, Any] = Field(default_factory=dict)
