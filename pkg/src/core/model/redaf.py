"""Relation-guided dual adaptive fusion and the rotation scoring function.

Each modality is mapped into a shared d_e space (a learnable table for the
structural modality, a projection MLP for feature modalities). Modality
weights come from a softmax over ``V . tanh(e_m)`` scaled by a per-relation
temperature ``sigmoid(zeta_r)``, and the joint embedding is the weighted
sum. Triples are scored with ``-|| rotate(h, theta_r) - t ||``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from src.contracts.config import STRUCTURAL
from src.contracts.errors import ConfigError, ShapeError
from src.core.autodiff import Tensor, as_tensor, ops

if TYPE_CHECKING:
    from src.core.data.dataset import ModalityFeatureStore
    from src.core.model.params import ModelParams, ParamView

MASK_BIAS = -1e9


@dataclass(frozen=True)
class JointEmbedding:
    """Fused entity embeddings together with the weights that produced them."""

    vector: Tensor
    weights: Tensor


def raw_features(
    params: ModelParams,
    store: ModalityFeatureStore,
    modality: str,
    entity_ids: np.ndarray,
) -> np.ndarray:
    """Raw feature rows for ``entity_ids``; missing rows come from the bank."""
    matrix, mask = store.dense(modality, params.n_entities)
    rows = matrix[entity_ids]
    missing = ~mask[entity_ids]
    if missing.any():
        rows = rows.copy()
        rows[missing] = params.missing_bank.rows(modality, entity_ids[missing])
    return rows


def encode_modality(
    view: ParamView,
    store: ModalityFeatureStore,
    entity_ids: np.ndarray,
    modality: str,
) -> Tensor:
    """Project raw features of one modality into the shared space.

    Each distinct entity is projected once; rows are then gathered back
    into batch order.

    Raises:
        ConfigError: If ``modality`` is not part of the model layout.
    """
    if modality not in view.layout.feature_dims:
        msg = f"Modality '{modality}' is not enabled. Enabled: {', '.join(view.layout.modalities)}"
        raise ConfigError(msg)
    ids = np.asarray(entity_ids, dtype=np.int64).reshape(-1)
    unique, inverse = np.unique(ids, return_inverse=True)
    raw = raw_features(view.params, store, modality, unique)
    prefix = f"projection.{modality}"
    hidden = ops.relu(ops.matmul(raw, view[f"{prefix}.w1"]) + view[f"{prefix}.b1"])
    projected = ops.matmul(hidden, view[f"{prefix}.w2"]) + view[f"{prefix}.b2"]
    return ops.take(projected, inverse.reshape(-1))


def modality_embeddings(
    view: ParamView,
    store: ModalityFeatureStore,
    entity_ids: np.ndarray,
) -> list[Tensor]:
    """Per-modality embeddings of shape (B, d_e) in layout order."""
    ids = np.asarray(entity_ids, dtype=np.int64).reshape(-1)
    out = []
    for modality in view.layout.modalities:
        if modality == STRUCTURAL:
            out.append(ops.take(view["entity"], ids))
        else:
            out.append(encode_modality(view, store, ids, modality))
    return out


def presence_mask(
    params: ModelParams,
    store: ModalityFeatureStore,
    entity_ids: np.ndarray,
) -> np.ndarray | None:
    """(B, N) availability mask, or None when every slot takes part."""
    if params.missing_policy != "mask":
        return None
    ids = np.asarray(entity_ids, dtype=np.int64).reshape(-1)
    columns = []
    for modality in params.layout.modalities:
        if modality == STRUCTURAL:
            columns.append(np.ones(len(ids), dtype=bool))
        else:
            columns.append(store.dense(modality, params.n_entities)[1][ids])
    return np.stack(columns, axis=1)


def modality_weights(
    view: ParamView,
    embeddings: list[Tensor],
    relation_ids: np.ndarray,
    mask: np.ndarray | None = None,
) -> Tensor:
    """Softmax fusion weights of shape (B, N).

    With relation guidance the logits are divided by ``sigmoid(zeta_r)``:
    small temperatures sharpen the distribution, large ones flatten it.
    Masked slots receive exactly zero weight.
    """
    if not embeddings:
        msg = "modality_weights: no modality embeddings"
        raise ConfigError(msg)
    fusion = view["fusion_vector"]
    logits = ops.concat(
        [ops.sum(fusion * ops.tanh(e), axis=-1, keepdims=True) for e in embeddings]
    )
    if view.params.relation_guidance:
        rel = np.asarray(relation_ids, dtype=np.int64).reshape(-1)
        temperature = ops.sigmoid(ops.take(view["relation_temperature"], rel))
        logits = logits / ops.reshape(temperature, (-1, 1))
    if mask is not None:
        if mask.shape != logits.shape:
            raise ShapeError("modality_weights", mask.shape, logits.shape)
        if not mask.any(axis=1).all():
            msg = "modality_weights: an entity has no available modality"
            raise ConfigError(msg)
        logits = logits + np.where(mask, 0.0, MASK_BIAS)
    return ops.softmax(logits, axis=-1)


def fuse_embeddings(
    view: ParamView,
    embeddings: list[Tensor],
    relation_ids: np.ndarray,
    mask: np.ndarray | None = None,
) -> JointEmbedding:
    """Weighted sum of per-modality embeddings under a relation context."""
    weights = modality_weights(view, embeddings, relation_ids, mask)
    columns = ops.split(weights, [1] * len(embeddings))
    vector = columns[0] * embeddings[0]
    for column, embedding in zip(columns[1:], embeddings[1:], strict=True):
        vector = vector + column * embedding
    return JointEmbedding(vector=vector, weights=weights)


def fuse(
    view: ParamView,
    store: ModalityFeatureStore,
    entity_ids: np.ndarray,
    relation_ids: np.ndarray,
) -> JointEmbedding:
    """Joint embeddings of real entities: encode, weight, and sum."""
    return fuse_embeddings(
        view,
        modality_embeddings(view, store, entity_ids),
        relation_ids,
        presence_mask(view.params, store, entity_ids),
    )


def relation_phases(view: ParamView, relation_ids: np.ndarray) -> Tensor:
    return ops.take(view["relation_phase"], np.asarray(relation_ids, dtype=np.int64).reshape(-1))


def rotate(h: Tensor, theta: Tensor) -> Tensor:
    """Element-wise complex rotation; preserves each coordinate's modulus."""
    return ops.rotate(h, theta)


def score(h_joint: Tensor, theta: Tensor, t_joint: Tensor) -> Tensor:
    """Plausibility ``-|| rotate(h, theta) - t ||`` along the last axis."""
    return ops.neg(ops.norm(rotate(h_joint, theta) - t_joint, axis=-1))


def score_input_grad(
    h_joint: Tensor,
    theta: Tensor,
    t_joint: Tensor,
    eps: float = 1e-12,
) -> tuple[Tensor, Tensor]:
    """Closed-form gradients of the score with respect to h and t.

    With ``d = rotate(h, theta) - t`` and ``n = sqrt(sum d^2 + eps)`` the
    gradients are ``-rotate(d, -theta) / n`` for h and ``d / n`` for t.
    The results stay on the tape so penalties built from them are
    differentiable.

    Raises:
        ValueError: If ``eps`` is zero and ``d`` vanishes.
    """
    diff = rotate(h_joint, theta) - t_joint
    squared = ops.sum(ops.square(diff), axis=-1, keepdims=True)
    if eps == 0 and np.any(squared.data == 0):
        msg = "score_input_grad: gradient undefined where rotate(h) equals t"
        raise ValueError(msg)
    length = ops.sqrt(squared + eps)
    grad_t = diff / length
    grad_h = ops.neg(rotate(diff, ops.neg(theta))) / length
    return grad_h, grad_t


def self_adv_weights(neg_scores: Tensor | np.ndarray, beta: float) -> Tensor:
    """Softmax of ``beta * F`` over the negatives of each positive.

    The weights are constants: no gradient flows through them.
    """
    return ops.softmax(ops.scale(ops.stop_gradient(as_tensor(neg_scores)), beta), axis=-1)


def score_triples(
    view: ParamView,
    store: ModalityFeatureStore,
    triples: np.ndarray,
) -> Tensor:
    """Scores of (n, 3) id triples, fusing heads and tails in one pass."""
    triples = np.asarray(triples, dtype=np.int64).reshape(-1, 3)
    n = len(triples)
    relations = triples[:, 1]
    joint = fuse(
        view,
        store,
        np.concatenate([triples[:, 0], triples[:, 2]]),
        np.concatenate([relations, relations]),
    )
    heads = ops.take(joint.vector, np.arange(n))
    tails = ops.take(joint.vector, np.arange(n, 2 * n))
    return score(heads, relation_phases(view, relations), tails)


def kgc_loss(
    view: ParamView,
    store: ModalityFeatureStore,
    positives: np.ndarray,
    negatives: np.ndarray,
    gamma: float,
    beta: float,
) -> Tensor:
    """Self-adversarial negative-sampling loss, summed over the batch.

    Args:
        view: Parameter view; its trainable group receives gradients.
        store: Raw modality features.
        positives: (B, 3) id triples.
        negatives: (B, K, 3) corrupted triples aligned with ``positives``.
        gamma: Margin.
        beta: Self-adversarial temperature; 0 weights negatives uniformly.

    Returns:
        Scalar loss tensor.
    """
    positives = np.asarray(positives, dtype=np.int64).reshape(-1, 3)
    negatives = np.asarray(negatives, dtype=np.int64)
    if negatives.ndim != 3 or negatives.shape[0] != len(positives) or negatives.shape[2] != 3:
        raise ShapeError("kgc_loss", positives.shape, negatives.shape)
    b, k = negatives.shape[:2]
    scores = score_triples(view, store, np.concatenate([positives, negatives.reshape(-1, 3)]))
    positive = ops.take(scores, np.arange(b))
    negative = ops.reshape(ops.take(scores, np.arange(b, b + b * k)), (b, k))
    weights = self_adv_weights(negative, beta)
    positive_term = ops.sum(ops.log_sigmoid(positive + gamma))
    negative_term = ops.sum(weights * ops.log_sigmoid(ops.neg(negative) - gamma))
    return ops.neg(positive_term + negative_term)
