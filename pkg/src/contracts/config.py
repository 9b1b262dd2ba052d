"""Run configuration contracts."""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

STRUCTURAL = "S"


class HyperParams(BaseModel):
    """Model and optimisation hyperparameters.

    Defaults are full-scale settings; desk-scale presets in
    ``configs/experiments`` shrink dims, negatives, and epochs.
    """

    model_config = ConfigDict(extra="forbid")

    d_e: int = Field(default=250, gt=0, description="Entity embedding size (even)")
    gamma: float = Field(default=12.0, gt=0, description="Margin")
    beta: float = Field(default=2.0, ge=0, description="Self-adversarial temperature")
    num_negatives: int = Field(default=64, ge=1, description="K negatives per positive")
    lambda1: float = Field(default=1e-3, ge=0)
    lambda2: float = Field(default=1e-4, ge=0)
    noise_dim: int = Field(default=64, ge=1)
    lr_d: float = Field(default=1e-4, gt=0)
    lr_g: float = Field(default=1e-4, gt=0)
    batch_size: int = Field(default=1024, ge=1)
    epochs: int = Field(default=1000, ge=0)
    n_critic: int = Field(default=1, ge=1)
    init_scale: float = Field(default=0.05, gt=0)
    generator_hidden: int | None = Field(default=None, ge=1)

    @model_validator(mode="after")
    def _check_even_dim(self) -> HyperParams:
        if self.d_e % 2:
            msg = f"d_e must be even for complex rotation, got {self.d_e}"
            raise ValueError(msg)
        return self

    @property
    def d_r(self) -> int:
        return self.d_e // 2


class AblationFlags(BaseModel):
    """Switches for the ablation study."""

    model_config = ConfigDict(extra="forbid")

    no_comat: bool = False
    no_relation_guidance: bool = False
    no_gp: bool = False
    vanilla_gan: bool = False
    mlp_discriminator: bool = False
    gp_sign: Literal["paper", "standard"] = Field(
        default="paper",
        description="'paper' negates the penalty sum; 'negated' is accepted as an alias",
    )

    @field_validator("gp_sign", mode="before")
    @classmethod
    def _alias_gp_sign(cls, value: object) -> object:
        return "paper" if value == "negated" else value


class RunConfig(HyperParams):
    """Everything needed to reproduce one run."""

    data_dir: str = "data/synth"
    out_dir: str = "outputs/run"
    seed: int = Field(default=42, ge=0, lt=2**64)
    modalities: list[str] | None = Field(
        default=None,
        description="Subset of modalities to use; 'S' is the structural one",
    )
    missing_policy: Literal["random", "mask"] = "random"
    flags: AblationFlags = Field(default_factory=AblationFlags)
    save_every: int = Field(default=0, ge=0)
    eval_every: int = Field(default=0, ge=0)
    eval_split: Literal["valid", "test"] = "test"
    threads: int = Field(default=1, ge=1)

    @model_validator(mode="after")
    def _check_modalities(self) -> RunConfig:
        if self.modalities is not None:
            if not self.modalities:
                msg = "modalities filter must keep at least one modality"
                raise ValueError(msg)
            if len(set(self.modalities)) != len(self.modalities):
                msg = f"duplicate modality in filter: {self.modalities}"
                raise ValueError(msg)
        return self

    @property
    def comat_enabled(self) -> bool:
        return not self.flags.no_comat

    @property
    def effective_lambda1(self) -> float:
        return 0.0 if self.flags.no_comat else self.lambda1

    @property
    def effective_lambda2(self) -> float:
        return 0.0 if self.flags.no_gp else self.lambda2

    def hyperparams(self) -> HyperParams:
        """Return only the HyperParams view of this config."""
        return HyperParams(**self.model_dump(include=set(HyperParams.model_fields)))
