"""Training callbacks for emitting telemetry events.

The trainer calls these hooks at run boundaries and after every epoch,
so telemetry stays decoupled from the training loop.
"""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING

from src.contracts.events import RunEvent
from src.telemetry.events import EventWriter

if TYPE_CHECKING:
    from src.contracts.metrics import EpochLosses
    from src.core.training.trainer import NativeTrainer

logger = logging.getLogger(__name__)


class TrainerCallback:
    """No-op base class; override the hooks you need."""

    def on_train_begin(self, trainer: NativeTrainer) -> None:
        pass

    def on_epoch_end(self, trainer: NativeTrainer, losses: EpochLosses) -> None:
        pass

    def on_train_end(self, trainer: NativeTrainer) -> None:
        pass


class TelemetryCallback(TrainerCallback):
    """Trainer callback that emits one RunEvent per epoch to an EventWriter.

    Args:
        event_writer: EventWriter for persisting telemetry events.
        run_id: Unique run identifier.
    """

    def __init__(self, event_writer: EventWriter, run_id: str) -> None:
        self.event_writer = event_writer
        self.run_id = run_id

    def on_epoch_end(self, trainer: NativeTrainer, losses: EpochLosses) -> None:
        config = trainer.config
        extras = {}
        if trainer.last_validation is not None:
            extras["valid_mrr"] = trainer.last_validation.mrr
        event = RunEvent(
            run_id=self.run_id,
            epoch=losses.epoch,
            d_loss=losses.d_loss,
            g_loss=losses.g_loss,
            lr_d=config.lr_d,
            lr_g=config.lr_g if config.comat_enabled else None,
            extras=extras,
        )
        self.event_writer.write(event)


def create_telemetry_callback(log_dir: str, run_id: str) -> TelemetryCallback:
    """Factory for creating a TelemetryCallback with its EventWriter.

    Args:
        log_dir: Directory for telemetry logs.
        run_id: Unique run identifier.

    Returns:
        Configured TelemetryCallback ready for the trainer.
    """
    writer = EventWriter(log_dir, run_id)
    logger.info("Telemetry: writing %s", writer.log_path)
    return TelemetryCallback(writer, run_id)
