"""Tests for contract models."""

from __future__ import annotations

import pytest
from pydantic import ValidationError

from src.contracts.checkpoint import CheckpointManifest
from src.contracts.config import AblationFlags, HyperParams, RunConfig
from src.contracts.data import GroupLabel, ImbalanceSpec, ModalitySpec, Triple
from src.contracts.errors import (
    CheckpointError,
    ConfigError,
    DataError,
    NonFiniteError,
    ShapeError,
)
from src.contracts.events import RunEvent
from src.contracts.metrics import EpochLosses, MetricsReport


class TestHyperParams:
    def test_defaults(self) -> None:
        hp = HyperParams()
        assert hp.d_e == 250
        assert hp.d_r == 125
        assert hp.num_negatives == 64
        assert hp.generator_hidden is None

    def test_odd_dim_rejected(self) -> None:
        with pytest.raises(ValidationError, match="even"):
            HyperParams(d_e=5)

    def test_unknown_field_rejected(self) -> None:
        with pytest.raises(ValidationError):
            HyperParams(learning_rate=0.1)

    def test_invalid_batch_size(self) -> None:
        with pytest.raises(ValidationError):
            HyperParams(batch_size=0)


class TestRunConfig:
    def test_hyperparams_view(self) -> None:
        config = RunConfig(d_e=8, seed=1)
        assert config.hyperparams() == HyperParams(d_e=8)

    def test_ablation_weights(self) -> None:
        config = RunConfig(lambda1=0.5, lambda2=0.2, flags=AblationFlags(no_comat=True, no_gp=True))
        assert config.effective_lambda1 == 0.0
        assert config.effective_lambda2 == 0.0
        assert not config.comat_enabled

    def test_empty_modality_filter(self) -> None:
        with pytest.raises(ValidationError, match="at least one"):
            RunConfig(modalities=[])

    def test_duplicate_modality_filter(self) -> None:
        with pytest.raises(ValidationError, match="duplicate"):
            RunConfig(modalities=["S", "S"])

    def test_gp_sign_values(self) -> None:
        assert AblationFlags().gp_sign == "paper"
        assert AblationFlags(gp_sign="paper").gp_sign == "paper"
        assert AblationFlags(gp_sign="negated").gp_sign == "paper"
        with pytest.raises(ValidationError):
            AblationFlags(gp_sign="flipped")


class TestDataContracts:
    def test_triple_is_a_tuple(self) -> None:
        assert Triple(1, 0, 2) == (1, 0, 2)
        assert Triple(1, 0, 2).tail == 2

    def test_modality_spec(self) -> None:
        with pytest.raises(ValidationError):
            ModalitySpec(name="I", dim=0)

    def test_imbalance_bounds(self) -> None:
        with pytest.raises(ValidationError):
            ImbalanceSpec(eta=1.5)
        assert ImbalanceSpec(eta=0.2).level == "entity"

    def test_group_labels(self) -> None:
        assert [g.value for g in GroupLabel] == ["Group1", "Group2", "Group3"]


class TestMetricsReport:
    def test_valid_report(self) -> None:
        report = MetricsReport(mrr=0.5, hits={1: 0.25, 3: 0.5, 10: 1.0}, n_queries=4)
        assert report.groups == {}

    def test_non_monotone_hits(self) -> None:
        with pytest.raises(ValidationError, match="monotone"):
            MetricsReport(mrr=0.5, hits={1: 0.5, 3: 0.25, 10: 1.0}, n_queries=4)

    def test_mrr_below_hits_at_one(self) -> None:
        with pytest.raises(ValidationError, match="inconsistent"):
            MetricsReport(mrr=0.1, hits={1: 0.5, 3: 0.5, 10: 0.5}, n_queries=4)

    def test_json_is_stable(self) -> None:
        report = MetricsReport(
            mrr=0.5,
            hits={1: 0.25, 3: 0.5, 10: 1.0},
            n_queries=4,
            loss_curve=[EpochLosses(epoch=1, d_loss=1.0)],
            wall_clock_seconds=3.2,
        )
        again = report.model_copy(update={"wall_clock_seconds": 9.9})
        assert report.to_json() == again.to_json()


class TestRunEvent:
    def test_no_timestamp(self) -> None:
        event = RunEvent(run_id="run-001", epoch=0, d_loss=2.5, lr_d=5e-5)
        assert "timestamp" not in event.model_dump()


class TestCheckpointManifest:
    def test_extra_fields_rejected(self) -> None:
        with pytest.raises(ValidationError):
            CheckpointManifest(
                d_e=4, modalities=["S"], feature_dims={}, n_entities=2, n_relations=1,
                seed=0, hyperparams={}, tensors=[], extra=True,
            )


class TestErrors:
    @pytest.mark.parametrize(
        ("error", "code"),
        [(ConfigError("x"), 2), (DataError("x"), 3), (CheckpointError("x"), 3), (NonFiniteError("x"), 4)],
    )
    def test_exit_codes(self, error, code: int) -> None:
        assert error.exit_code == code

    def test_shape_error_message(self) -> None:
        error = ShapeError("matmul", (2, 3), (4, 5), detail="inner dims")
        assert str(error) == "matmul: incompatible shapes (2, 3), (4, 5) (inner dims)"
        assert error.exit_code == 4
        assert isinstance(error, ValueError)
