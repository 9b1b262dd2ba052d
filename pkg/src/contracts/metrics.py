"""Evaluation and loss-curve contracts."""

from __future__ import annotations

from pydantic import BaseModel, Field, model_validator


class EpochLosses(BaseModel):
    """Mean discriminator and generator loss for one epoch."""

    epoch: int = Field(ge=1)
    d_loss: float
    g_loss: float | None = None


class MetricsReport(BaseModel):
    """Filtered link-prediction metrics."""

    mrr: float = Field(gt=0.0, le=1.0)
    hits: dict[int, float]
    n_queries: int = Field(ge=1)
    groups: dict[str, MetricsReport] = Field(default_factory=dict)
    loss_curve: list[EpochLosses] = Field(default_factory=list)
    wall_clock_seconds: float = Field(default=0.0, ge=0.0)

    @model_validator(mode="after")
    def _check_monotone_hits(self) -> MetricsReport:
        ordered = [self.hits[k] for k in sorted(self.hits)]
        if any(a > b + 1e-12 for a, b in zip(ordered, ordered[1:])):
            msg = f"hits must be monotone in k, got {self.hits}"
            raise ValueError(msg)
        if ordered and (ordered[-1] > 1.0 or self.mrr + 1e-12 < ordered[0]):
            msg = f"inconsistent mrr={self.mrr} and hits={self.hits}"
            raise ValueError(msg)
        return self

    def to_json(self) -> str:
        """Serialise with stable key order, leaving out timing."""
        return self.model_dump_json(
            indent=2, exclude=_timing_fields(self)
        )


def _timing_fields(report: MetricsReport) -> dict:
    exclude: dict = {"wall_clock_seconds": True}
    if report.groups:
        exclude["groups"] = {name: {"wall_clock_seconds"} for name in report.groups}
    return exclude
