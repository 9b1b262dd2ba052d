"""Collaborative modality adversarial training.

A conditional generator maps the concatenated per-modality embeddings of a
real entity plus Gaussian noise to synthetic per-modality embeddings. The
KGC model acts as the critic: it learns to score real triples above
triples that contain synthetic entities, while the generator learns to
fool it. Synthetic entities are fused with every modality present.
"""

from __future__ import annotations

import logging
from collections.abc import Callable
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from src.core.algorithms.wasserstein import WassersteinObjective
from src.core.autodiff import Tape, Tensor, backward, ops
from src.core.model.critics import MlpCritic, ScoreCritic
from src.core.model.params import DISCRIMINATOR, GENERATOR
from src.core.model.redaf import (
    fuse_embeddings,
    kgc_loss,
    modality_embeddings,
    presence_mask,
    relation_phases,
)

if TYPE_CHECKING:
    from src.contracts.algorithms import AdversarialObjective
    from src.contracts.config import RunConfig
    from src.core.data.dataset import ModalityFeatureStore
    from src.core.model.params import ModelParams, ParamView
    from src.core.training.optim import Adam

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SyntheticEntity:
    """Generator output: one (B, d_e) embedding per modality, layout order."""

    embeddings: list[Tensor]

    def concat(self) -> Tensor:
        return ops.concat(self.embeddings)


@dataclass(frozen=True)
class SyntheticSet:
    """Real and synthetic embeddings for a batch of positives.

    Joint embeddings (``head``, ``tail``, ``head_syn``, ``tail_syn``) feed
    the score critic; the concatenated forms feed the MLP critic.
    """

    theta: Tensor
    head: Tensor
    tail: Tensor
    head_syn: Tensor
    tail_syn: Tensor
    head_concat: Tensor
    tail_concat: Tensor
    head_syn_concat: Tensor
    tail_syn_concat: Tensor


GenerateFn = Callable[["ParamView", Tensor, np.ndarray], SyntheticEntity]
Critic = ScoreCritic | MlpCritic


def concat_real(
    view: ParamView,
    store: ModalityFeatureStore,
    entity_ids: np.ndarray,
) -> Tensor:
    """Concatenated per-modality embeddings, shape (B, N * d_e)."""
    return ops.concat(modality_embeddings(view, store, entity_ids))


def generate(view: ParamView, e_real: Tensor, z: np.ndarray) -> SyntheticEntity:
    """Run the generator MLP on ``[e_real ; z]`` and split per modality.

    Raises:
        ShapeError: If ``e_real`` or ``z`` do not match the layout.
    """
    layout = view.layout
    x = ops.concat([e_real, z])
    hidden = ops.relu(ops.matmul(x, view["generator.w1"]) + view["generator.b1"])
    out = ops.matmul(hidden, view["generator.w2"]) + view["generator.b2"]
    return SyntheticEntity(ops.split(out, [layout.d_e] * layout.n_modalities))


def draw_noise(rng: np.random.Generator, batch: int, noise_dim: int) -> tuple[np.ndarray, np.ndarray]:
    """Fresh standard-normal noise for the heads and tails of a batch."""
    return rng.standard_normal((batch, noise_dim)), rng.standard_normal((batch, noise_dim))


def synthetic_set(
    view: ParamView,
    store: ModalityFeatureStore,
    positives: np.ndarray,
    z_head: np.ndarray,
    z_tail: np.ndarray,
    generate_fn: GenerateFn = generate,
) -> SyntheticSet:
    """Build real and synthetic embeddings for the heads and tails of ``positives``.

    Gradients flow through the generator back into the real embeddings;
    which parameters update is decided by the view.
    """
    positives = np.asarray(positives, dtype=np.int64).reshape(-1, 3)
    heads, relations, tails = positives[:, 0], positives[:, 1], positives[:, 2]
    head_parts = modality_embeddings(view, store, heads)
    tail_parts = modality_embeddings(view, store, tails)
    head_concat = ops.concat(head_parts)
    tail_concat = ops.concat(tail_parts)
    head_syn = generate_fn(view, head_concat, z_head)
    tail_syn = generate_fn(view, tail_concat, z_tail)
    params = view.params
    return SyntheticSet(
        theta=relation_phases(view, relations),
        head=fuse_embeddings(view, head_parts, relations, presence_mask(params, store, heads)).vector,
        tail=fuse_embeddings(view, tail_parts, relations, presence_mask(params, store, tails)).vector,
        head_syn=fuse_embeddings(view, head_syn.embeddings, relations).vector,
        tail_syn=fuse_embeddings(view, tail_syn.embeddings, relations).vector,
        head_concat=head_concat,
        tail_concat=tail_concat,
        head_syn_concat=head_syn.concat(),
        tail_syn_concat=tail_syn.concat(),
    )


def adv_loss(
    view: ParamView,
    store: ModalityFeatureStore,
    positives: np.ndarray,
    z_head: np.ndarray,
    z_tail: np.ndarray,
    *,
    objective: AdversarialObjective | None = None,
    critic: Critic | None = None,
    generate_fn: GenerateFn = generate,
) -> Tensor:
    """Critic loss: ``sum(-F(h, r, t) + mean of the synthetic scores)`` by default.

    Args:
        view: Parameter view.
        store: Raw modality features.
        positives: (B, 3) id triples.
        z_head: (B, noise_dim) noise for the synthetic heads.
        z_tail: (B, noise_dim) noise for the synthetic tails.
        objective: Loss family; Wasserstein when omitted.
        critic: Scoring critic; the rotation score when omitted.
        generate_fn: Generator, injectable for tests.
    """
    objective = objective or WassersteinObjective()
    critic = critic or ScoreCritic()
    sset = synthetic_set(view, store, positives, z_head, z_tail, generate_fn)
    return objective.discriminator_loss(critic.real_scores(view, sset), critic.synthetic_scores(view, sset))


def gradient_penalty(
    view: ParamView,
    sset: SyntheticSet,
    *,
    critic: Critic | None = None,
    sign: str = "paper",
) -> Tensor:
    """Sum of ``(||grad F|| - 1)^2`` over every synthetic input.

    Args:
        view: Parameter view.
        sset: Embeddings the critic is evaluated at.
        critic: Critic whose input gradients are penalised.
        sign: ``"paper"`` puts a leading minus on the sum (default);
            ``"standard"`` keeps the usual positive penalty.
    """
    critic = critic or ScoreCritic()
    total = None
    for norms in critic.penalty_norms(view, sset):
        term = ops.sum(ops.square(norms - 1.0))
        total = term if total is None else total + term
    return ops.neg(total) if sign == "paper" else total


def discriminator_step(
    params: ModelParams,
    store: ModalityFeatureStore,
    positives: np.ndarray,
    negatives: np.ndarray,
    config: RunConfig,
    optimizer: Adam,
    noise_rng: np.random.Generator,
    *,
    objective: AdversarialObjective | None = None,
    critic: Critic | None = None,
) -> float:
    """One update of the KGC model on ``L_kgc + lambda1 * L_adv``.

    The adversarial term is skipped entirely (no noise drawn) when it has
    zero weight, so runs without it match a plain KGC run bit for bit.

    Returns:
        The discriminator loss before the update.
    """
    tape = Tape()
    view = params.on(tape, DISCRIMINATOR)
    view.watch_group()
    loss = kgc_loss(view, store, positives, negatives, config.gamma, config.beta)
    lambda1 = config.effective_lambda1
    if lambda1 > 0:
        z_head, z_tail = draw_noise(noise_rng, len(positives), config.noise_dim)
        adversarial = adv_loss(
            view, store, positives, z_head, z_tail, objective=objective, critic=critic
        )
        loss = loss + ops.scale(adversarial, lambda1)
    optimizer.step(backward(tape, loss))
    return loss.item()


def generator_step(
    params: ModelParams,
    store: ModalityFeatureStore,
    positives: np.ndarray,
    config: RunConfig,
    optimizer: Adam,
    noise_rng: np.random.Generator,
    *,
    objective: AdversarialObjective | None = None,
    critic: Critic | None = None,
) -> float:
    """One generator update on ``L_G = objective + lambda2 * L_gp``.

    Returns:
        The generator loss before the update.
    """
    objective = objective or WassersteinObjective()
    critic = critic or ScoreCritic()
    tape = Tape()
    view = params.on(tape, GENERATOR)
    view.watch_group()
    z_head, z_tail = draw_noise(noise_rng, len(positives), config.noise_dim)
    sset = synthetic_set(view, store, positives, z_head, z_tail)
    loss = objective.generator_loss(critic.real_scores(view, sset), critic.synthetic_scores(view, sset))
    lambda2 = config.effective_lambda2
    if lambda2 > 0:
        penalty = gradient_penalty(view, sset, critic=critic, sign=config.flags.gp_sign)
        loss = loss + ops.scale(penalty, lambda2)
    optimizer.step(backward(tape, loss))
    return loss.item()
