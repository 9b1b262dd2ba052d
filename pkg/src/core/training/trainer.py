"""NativeTrainer: orchestrates the adversarial KGC training loop.

Receives a validated config plus a loaded dataset, builds parameters,
optimisers, objective and critic, and runs the epoch loop with callbacks.
Training is single-threaded and fully determined by the seed.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING

import numpy as np

from src.contracts.errors import NonFiniteError
from src.contracts.metrics import EpochLosses
from src.core.algorithms import ObjectiveRegistry
from src.core.model.checkpoint import save_checkpoint
from src.core.model.comat import discriminator_step, generator_step
from src.core.model.critics import make_critic
from src.core.model.params import DISCRIMINATOR, GENERATOR, ModelLayout, ModelParams
from src.core.training.evaluation import evaluate
from src.core.training.optim import Adam
from src.core.training.sampling import negative_sample
from src.utils.seeding import epoch_stream, stream

if TYPE_CHECKING:
    from src.contracts.config import RunConfig
    from src.contracts.metrics import MetricsReport
    from src.core.data.dataset import KnowledgeGraph, ModalityFeatureStore
    from src.telemetry.callbacks import TrainerCallback

logger = logging.getLogger(__name__)

CHECKPOINT_DIR = "checkpoint"
LOSSES_FILE = "losses.csv"


@dataclass
class TrainResult:
    """Outcome of a training run."""

    params: ModelParams
    loss_curve: list[EpochLosses] = field(default_factory=list)
    checkpoint_dir: Path | None = None


class NativeTrainer:
    """Runs the two-player training loop for one configuration.

    Args:
        config: Validated run configuration.
        kg: Loaded knowledge graph.
        store: Modality features; restricted here to the enabled modalities.
    """

    def __init__(
        self,
        config: RunConfig,
        kg: KnowledgeGraph,
        store: ModalityFeatureStore,
    ) -> None:
        self.config = config
        self.kg = kg
        self.layout = ModelLayout.from_store(store, config.d_e, config.modalities)
        self.store = store.select(self.layout.feature_modalities)
        self.params = ModelParams.initialize(
            self.layout,
            kg.n_entities,
            kg.n_relations,
            config.hyperparams(),
            config.seed,
            relation_guidance=not config.flags.no_relation_guidance,
            missing_policy=config.missing_policy,
            mlp_critic=config.flags.mlp_discriminator,
        )
        self.d_optimizer = Adam(self.params, DISCRIMINATOR, config.lr_d)
        self.g_optimizer = Adam(self.params, GENERATOR, config.lr_g)
        self.objective = ObjectiveRegistry.for_flags(config.flags)
        self.critic = make_critic(config.flags.mlp_discriminator)
        self.loss_curve: list[EpochLosses] = []
        self.last_validation: MetricsReport | None = None

    def train(self, callbacks: list[TrainerCallback] | None = None) -> TrainResult:
        """Run every epoch, then write the final checkpoint and loss curve.

        Args:
            callbacks: Optional trainer callbacks.

        Returns:
            Final parameters, loss curve, and checkpoint location.

        Raises:
            NonFiniteError: If a loss or gradient stops being finite; the
                message names the epoch and batch.
        """
        config = self.config
        callbacks = callbacks or []
        out_dir = Path(config.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        logger.info(
            "Starting training: epochs=%d batch=%d triples=%d modalities=%s objective=%s critic=%s comat=%s",
            config.epochs,
            config.batch_size,
            len(self.kg.train),
            ",".join(self.layout.modalities),
            type(self.objective).__name__,
            self.critic.name,
            config.comat_enabled,
        )
        for callback in callbacks:
            callback.on_train_begin(self)

        negatives_rng = stream(config.seed, "negatives")
        noise_rng = stream(config.seed, "noise")
        for epoch in range(1, config.epochs + 1):
            losses = self._run_epoch(epoch, negatives_rng, noise_rng)
            self.loss_curve.append(losses)
            self.last_validation = None
            if config.eval_every and epoch % config.eval_every == 0 and len(self.kg.valid):
                self.last_validation = evaluate(
                    self.params, self.kg, self.store, "valid", threads=config.threads
                )
                logger.info("Epoch %d validation MRR=%.4f", epoch, self.last_validation.mrr)
            if config.save_every and epoch % config.save_every == 0:
                save_checkpoint(self.params, out_dir / f"{CHECKPOINT_DIR}-epoch{epoch}", config, epoch)
            for callback in callbacks:
                callback.on_epoch_end(self, losses)

        checkpoint_dir = save_checkpoint(self.params, out_dir / CHECKPOINT_DIR, config, config.epochs)
        write_losses(self.loss_curve, out_dir / LOSSES_FILE)
        for callback in callbacks:
            callback.on_train_end(self)
        logger.info("Training complete: checkpoint=%s", checkpoint_dir)
        return TrainResult(self.params, list(self.loss_curve), checkpoint_dir)

    def _run_epoch(
        self,
        epoch: int,
        negatives_rng: np.random.Generator,
        noise_rng: np.random.Generator,
    ) -> EpochLosses:
        config = self.config
        train = self.kg.train
        order = epoch_stream(config.seed, "shuffle", epoch).permutation(len(train))
        d_losses: list[float] = []
        g_losses: list[float] = []
        for batch, start in enumerate(range(0, len(train), config.batch_size)):
            positives = train[order[start : start + config.batch_size]]
            negatives = negative_sample(positives, config.num_negatives, self.kg.n_entities, negatives_rng)
            try:
                d_losses.append(
                    discriminator_step(
                        self.params,
                        self.store,
                        positives,
                        negatives,
                        config,
                        self.d_optimizer,
                        noise_rng,
                        objective=self.objective,
                        critic=self.critic,
                    )
                )
                if config.comat_enabled and (batch + 1) % config.n_critic == 0:
                    g_losses.append(
                        generator_step(
                            self.params,
                            self.store,
                            positives,
                            config,
                            self.g_optimizer,
                            noise_rng,
                            objective=self.objective,
                            critic=self.critic,
                        )
                    )
            except NonFiniteError as exc:
                msg = f"epoch {epoch} batch {batch}: {exc}"
                raise NonFiniteError(msg) from exc

        losses = EpochLosses(
            epoch=epoch,
            d_loss=float(np.mean(d_losses)) if d_losses else 0.0,
            g_loss=float(np.mean(g_losses)) if g_losses else None,
        )
        if losses.g_loss is None:
            logger.info("Epoch %d: d_loss=%.4f", epoch, losses.d_loss)
        else:
            logger.info("Epoch %d: d_loss=%.4f g_loss=%.4f", epoch, losses.d_loss, losses.g_loss)
        return losses


def write_losses(curve: list[EpochLosses], path: str | Path) -> Path:
    """Write ``epoch,d_loss,g_loss`` rows; g_loss is empty when absent."""
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["epoch", "d_loss", "g_loss"])
        for row in curve:
            writer.writerow([row.epoch, repr(row.d_loss), "" if row.g_loss is None else repr(row.g_loss)])
    return path


def train(
    config: RunConfig,
    kg: KnowledgeGraph,
    store: ModalityFeatureStore,
    callbacks: list[TrainerCallback] | None = None,
) -> TrainResult:
    """Convenience wrapper: build a NativeTrainer and run it."""
    return NativeTrainer(config, kg, store).train(callbacks)
