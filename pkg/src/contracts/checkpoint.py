"""Checkpoint manifest contract."""

from __future__ import annotations

from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field

CHECKPOINT_VERSION = 1


class TensorEntry(BaseModel):
    """One stored tensor and the parameter group it belongs to."""

    name: str
    group: Literal["discriminator", "generator"]
    shape: list[int]


class CheckpointManifest(BaseModel):
    """Everything needed to rebuild a model around the stored tensors."""

    model_config = ConfigDict(extra="forbid")

    version: int = CHECKPOINT_VERSION
    d_e: int = Field(gt=0)
    modalities: list[str] = Field(description="Layout order, structural first when used")
    feature_dims: dict[str, int]
    n_entities: int = Field(ge=1)
    n_relations: int = Field(ge=1)
    seed: int = Field(ge=0)
    missing_policy: Literal["random", "mask"] = "random"
    relation_guidance: bool = True
    epoch: int = Field(default=0, ge=0)
    data_dir: str | None = None
    hyperparams: dict[str, Any]
    flags: dict[str, Any] = Field(default_factory=dict)
    tensors: list[TensorEntry]
