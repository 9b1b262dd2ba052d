"""Learnable parameters, their groups, and tape-bound views."""

from __future__ import annotations

import hashlib
import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from src.contracts.config import STRUCTURAL
from src.contracts.errors import ConfigError
from src.core.autodiff import Tape, Tensor
from src.utils.seeding import stream

if TYPE_CHECKING:
    from collections.abc import Iterable

    from src.contracts.config import HyperParams
    from src.core.data.dataset import ModalityFeatureStore

logger = logging.getLogger(__name__)

DISCRIMINATOR = "discriminator"
GENERATOR = "generator"


@dataclass(frozen=True)
class ModelLayout:
    """Fixed modality order and sizes shared by fusion and the generator.

    ``modalities`` lists S first (when used) followed by feature
    modalities in manifest order.
    """

    modalities: tuple[str, ...]
    feature_dims: dict[str, int]
    d_e: int

    @classmethod
    def from_store(
        cls,
        store: ModalityFeatureStore,
        d_e: int,
        selected: Iterable[str] | None = None,
    ) -> ModelLayout:
        """Build the layout for a store, optionally filtered by name."""
        available = [STRUCTURAL, *store.names]
        wanted = list(available) if selected is None else list(selected)
        unknown = [m for m in wanted if m not in available]
        if unknown:
            msg = f"Unknown modalities {unknown}. Available: {', '.join(available)}"
            raise ConfigError(msg)
        order = tuple(m for m in available if m in wanted)
        if not order:
            msg = "At least one modality must be enabled"
            raise ConfigError(msg)
        dims = {m: store.dim(m) for m in order if m != STRUCTURAL}
        return cls(modalities=order, feature_dims=dims, d_e=d_e)

    @property
    def n_modalities(self) -> int:
        return len(self.modalities)

    @property
    def feature_modalities(self) -> list[str]:
        return [m for m in self.modalities if m != STRUCTURAL]

    @property
    def concat_dim(self) -> int:
        return self.n_modalities * self.d_e


class MissingFeatureBank:
    """Random raw features for missing (entity, modality) slots.

    Each slot is drawn once from its own seeded stream, uniform in
    [-b, b] with b = 6 / sqrt(d_m + d_e), then cached. Values therefore
    do not depend on the order in which slots are first requested.
    """

    def __init__(self, seed: int, layout: ModelLayout) -> None:
        self.seed = seed
        self.layout = layout
        self._index = {m: i for i, m in enumerate(layout.modalities)}
        self._rows: dict[str, dict[int, np.ndarray]] = {m: {} for m in layout.feature_dims}

    def bound(self, modality: str) -> float:
        return 6.0 / np.sqrt(self.layout.feature_dims[modality] + self.layout.d_e)

    def rows(self, modality: str, entity_ids: np.ndarray) -> np.ndarray:
        cache = self._rows[modality]
        dim = self.layout.feature_dims[modality]
        out = np.empty((len(entity_ids), dim))
        for i, entity in enumerate(entity_ids.tolist()):
            row = cache.get(entity)
            if row is None:
                b = self.bound(modality)
                rng = stream(self.seed, "missing", self._index[modality], entity)
                row = rng.uniform(-b, b, size=dim)
                cache[entity] = row
            out[i] = row
        return out

    def __len__(self) -> int:
        return sum(len(rows) for rows in self._rows.values())


class ModelParams:
    """All learnable arrays, keyed by name and assigned to a group.

    The discriminator group holds structural embeddings, relation phases,
    projection MLPs, the fusion vector, relation temperatures and, for the
    MLP critic ablation, the critic weights. The generator group holds the
    generator MLP.
    """

    def __init__(
        self,
        tensors: dict[str, np.ndarray],
        groups: dict[str, str],
        layout: ModelLayout,
        n_entities: int,
        n_relations: int,
        seed: int,
        *,
        relation_guidance: bool = True,
        missing_policy: str = "random",
    ) -> None:
        self.tensors = tensors
        self.groups = groups
        self.layout = layout
        self.n_entities = n_entities
        self.n_relations = n_relations
        self.seed = seed
        self.relation_guidance = relation_guidance
        self.missing_policy = missing_policy
        self.missing_bank = MissingFeatureBank(seed, layout)

    @classmethod
    def initialize(
        cls,
        layout: ModelLayout,
        n_entities: int,
        n_relations: int,
        hp: HyperParams,
        seed: int,
        *,
        relation_guidance: bool = True,
        missing_policy: str = "random",
        mlp_critic: bool = False,
    ) -> ModelParams:
        """Draw initial values from the ``init*`` streams of ``seed``."""
        d_e = layout.d_e
        rng = stream(seed, "init")
        tensors: dict[str, np.ndarray] = {
            "entity": rng.uniform(-hp.init_scale, hp.init_scale, (n_entities, d_e)),
            "relation_phase": rng.uniform(-np.pi, np.pi, (n_relations, d_e // 2)),
            "fusion_vector": rng.uniform(-0.01, 0.01, d_e),
            "relation_temperature": np.zeros(n_relations),
        }
        for m in layout.feature_modalities:
            tensors.update(_mlp(rng, f"projection.{m}", layout.feature_dims[m], d_e, d_e))
        groups = dict.fromkeys(tensors, DISCRIMINATOR)

        hidden = hp.generator_hidden or 2 * layout.concat_dim
        generator = _mlp(
            stream(seed, "init_generator"),
            "generator",
            layout.concat_dim + hp.noise_dim,
            hidden,
            layout.concat_dim,
        )
        tensors.update(generator)
        groups.update(dict.fromkeys(generator, GENERATOR))

        if mlp_critic:
            critic = _mlp(stream(seed, "init_critic"), "critic", layout.concat_dim, d_e, 1)
            critic["critic.w2"] = critic["critic.w2"].reshape(-1)
            critic["critic.b2"] = critic["critic.b2"].reshape(())
            tensors.update(critic)
            groups.update(dict.fromkeys(critic, DISCRIMINATOR))

        logger.info(
            "Initialised parameters: modalities=%s d_e=%d discriminator=%d generator=%d",
            ",".join(layout.modalities),
            d_e,
            sum(tensors[n].size for n in tensors if groups[n] == DISCRIMINATOR),
            sum(tensors[n].size for n in tensors if groups[n] == GENERATOR),
        )
        return cls(
            tensors,
            groups,
            layout,
            n_entities,
            n_relations,
            seed,
            relation_guidance=relation_guidance,
            missing_policy=missing_policy,
        )

    @property
    def has_critic(self) -> bool:
        return "critic.w1" in self.tensors

    def names(self, group: str) -> list[str]:
        return [n for n in self.tensors if self.groups[n] == group]

    def on(self, tape: Tape | None, train: str | None = None) -> ParamView:
        """Bind to a tape; only the ``train`` group becomes differentiable."""
        return ParamView(self, tape, train)

    def checksum(self, group: str) -> str:
        """SHA-256 over the group's names and raw bytes."""
        digest = hashlib.sha256()
        for name in sorted(self.names(group)):
            digest.update(name.encode())
            digest.update(np.ascontiguousarray(self.tensors[name]).tobytes())
        return digest.hexdigest()

    def unit_modulus_error(self) -> float:
        """Max |cos^2 + sin^2 - 1| over every relation element."""
        theta = self.tensors["relation_phase"]
        return float(np.abs(np.cos(theta) ** 2 + np.sin(theta) ** 2 - 1.0).max())


class ParamView:
    """Read access to parameters as tensors for one forward pass."""

    def __init__(self, params: ModelParams, tape: Tape | None, train: str | None) -> None:
        self.params = params
        self.tape = tape
        self.train = train
        self._cache: dict[str, Tensor] = {}

    @property
    def layout(self) -> ModelLayout:
        return self.params.layout

    def __getitem__(self, name: str) -> Tensor:
        tensor = self._cache.get(name)
        if tensor is None:
            array = self.params.tensors[name]
            trainable = self.tape is not None and self.params.groups[name] == self.train
            tensor = self.tape.watch(array, name) if trainable else Tensor(array)
            self._cache[name] = tensor
        return tensor

    def watch_group(self) -> None:
        """Register every trainable leaf so unreached ones get zero gradients."""
        if self.train is not None:
            for name in self.params.names(self.train):
                self[name]


def _mlp(
    rng: np.random.Generator, prefix: str, n_in: int, n_hidden: int, n_out: int
) -> dict[str, np.ndarray]:
    """Two-layer weights with uniform Glorot init and zero biases."""
    b1 = np.sqrt(6.0 / (n_in + n_hidden))
    b2 = np.sqrt(6.0 / (n_hidden + n_out))
    return {
        f"{prefix}.w1": rng.uniform(-b1, b1, (n_in, n_hidden)),
        f"{prefix}.b1": np.zeros(n_hidden),
        f"{prefix}.w2": rng.uniform(-b2, b2, (n_hidden, n_out)),
        f"{prefix}.b2": np.zeros(n_out),
    }
