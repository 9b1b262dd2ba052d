"""Data contracts for knowledge graphs and modality features."""

from __future__ import annotations

from enum import Enum
from typing import Literal, NamedTuple

from pydantic import BaseModel, Field


class Triple(NamedTuple):
    """A fact as integer ids."""

    head: int
    relation: int
    tail: int


class ModalitySpec(BaseModel):
    """A declared modality and its raw feature size."""

    name: str = Field(min_length=1)
    dim: int = Field(ge=1)


class DatasetManifest(BaseModel):
    """The ``manifest.json`` of a dataset directory."""

    modalities: list[ModalitySpec] = Field(default_factory=list)


class ImbalanceSpec(BaseModel):
    """How much modality information to drop, and at which level."""

    eta: float = Field(ge=0.0, le=1.0)
    level: Literal["entity", "modality"] = "entity"
    seed: int = Field(default=0, ge=0, lt=2**64)


class GroupLabel(str, Enum):
    """Modality completeness of a test triple's endpoints."""

    GROUP1 = "Group1"  # both complete
    GROUP2 = "Group2"  # exactly one incomplete
    GROUP3 = "Group3"  # both incomplete


class DropManifest(BaseModel):
    """Record of what a perturbation removed."""

    level: Literal["entity", "modality"]
    eta: float
    seed: int
    entities: list[str] = Field(default_factory=list)
    entries: list[tuple[str, str]] = Field(default_factory=list)
