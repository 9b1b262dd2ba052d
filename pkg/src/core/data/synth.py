"""Synthetic multi-modal knowledge graphs with planted structure.

Entities are partitioned into clusters. Each relation maps every cluster
onto one target cluster (a permutation of clusters), and a head links to
a random subset of its target cluster's members. Modality features are
the cluster centroid plus bounded uniform noise, so every modality is
informative of link structure.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import TYPE_CHECKING

import numpy as np

from src.contracts.data import ModalitySpec
from src.contracts.errors import ConfigError
from src.core.data.dataset import KnowledgeGraph, ModalityFeatureStore, save_dataset
from src.utils.seeding import stream

if TYPE_CHECKING:
    from collections.abc import Sequence

logger = logging.getLogger(__name__)

# stream keys inside the "synth" stream
_CLUSTERS, _RELATIONS, _LINKS, _SPLIT, _CENTROIDS, _NOISE = range(6)


def gen_synth(
    out_dir: str | Path,
    n_entities: int = 100,
    n_relations: int = 10,
    modalities: Sequence[str] = ("I", "T"),
    dims: Sequence[int] = (16, 16),
    seed: int = 0,
    n_clusters: int | None = None,
    density: float = 0.3,
    noise: float = 0.05,
) -> Path:
    """Write a synthetic dataset directory and return its path.

    Output is a pure function of the arguments.

    Raises:
        ConfigError: On degenerate sizes or parameters.
    """
    n_clusters = default_clusters(n_entities) if n_clusters is None else n_clusters
    _validate(n_entities, n_relations, modalities, dims, n_clusters, density, noise)

    clusters = synth_clusters(seed, n_entities, n_clusters)
    triples = _link(seed, clusters, n_clusters, n_relations, density)
    n_train = round(0.8 * len(triples))
    n_valid = round(0.1 * len(triples))

    width = len(str(n_entities - 1))
    kg = KnowledgeGraph.build(
        entities=[f"e{i:0{width}d}" for i in range(n_entities)],
        relations=[f"r{j:0{len(str(n_relations - 1))}d}" for j in range(n_relations)],
        train=triples[:n_train],
        valid=triples[n_train : n_train + n_valid],
        test=triples[n_train + n_valid :],
    )

    centroids = synth_centroids(seed, n_clusters, modalities, dims)
    features = {}
    for index, (name, dim) in enumerate(zip(modalities, dims, strict=True)):
        rng = stream(seed, "synth", _NOISE, index)
        jitter = rng.uniform(-noise, noise, size=(n_entities, dim))
        matrix = centroids[name][clusters] + jitter
        features[name] = {e: matrix[e] for e in range(n_entities)}
    store = ModalityFeatureStore(
        specs=tuple(ModalitySpec(name=m, dim=d) for m, d in zip(modalities, dims, strict=True)),
        features=features,
    )

    root = save_dataset(kg, store, out_dir)
    info = {
        "n_entities": n_entities,
        "n_relations": n_relations,
        "n_clusters": n_clusters,
        "density": density,
        "noise": noise,
        "seed": seed,
        "n_triples": len(triples),
    }
    (root / "synth.json").write_text(json.dumps(info, indent=2) + "\n", encoding="utf-8")
    logger.info(
        "Generated synthetic dataset at %s: %d triples (%d/%d/%d)",
        root,
        len(triples),
        len(kg.train),
        len(kg.valid),
        len(kg.test),
    )
    return root


def default_clusters(n_entities: int) -> int:
    return max(2, n_entities // 10)


def synth_clusters(seed: int, n_entities: int, n_clusters: int) -> np.ndarray:
    """Cluster id per entity, balanced and shuffled."""
    rng = stream(seed, "synth", _CLUSTERS)
    return rng.permutation(np.arange(n_entities) % n_clusters)


def synth_centroids(
    seed: int,
    n_clusters: int,
    modalities: Sequence[str],
    dims: Sequence[int],
) -> dict[str, np.ndarray]:
    """Per-modality (n_clusters, dim) centroid matrices."""
    centroids = {}
    for index, (name, dim) in enumerate(zip(modalities, dims, strict=True)):
        rng = stream(seed, "synth", _CENTROIDS, index)
        centroids[name] = rng.standard_normal((n_clusters, dim))
    return centroids


def _link(
    seed: int,
    clusters: np.ndarray,
    n_clusters: int,
    n_relations: int,
    density: float,
) -> list[tuple[int, int, int]]:
    members = [np.flatnonzero(clusters == c) for c in range(n_clusters)]
    targets = stream(seed, "synth", _RELATIONS)
    mapping = [targets.permutation(n_clusters) for _ in range(n_relations)]

    rng = stream(seed, "synth", _LINKS)
    triples = []
    for head, cluster in enumerate(clusters.tolist()):
        for relation in range(n_relations):
            candidates = members[mapping[relation][cluster]]
            chosen = candidates[rng.random(len(candidates)) < density]
            triples.extend((head, relation, int(tail)) for tail in chosen)

    order = stream(seed, "synth", _SPLIT).permutation(len(triples))
    return [triples[i] for i in order]


def _validate(
    n_entities: int,
    n_relations: int,
    modalities: Sequence[str],
    dims: Sequence[int],
    n_clusters: int,
    density: float,
    noise: float,
) -> None:
    problems = []
    if n_entities < 10:
        problems.append(f"n_entities must be >= 10, got {n_entities}")
    if n_relations < 1:
        problems.append(f"n_relations must be >= 1, got {n_relations}")
    if len(modalities) != len(dims):
        problems.append(f"{len(modalities)} modalities but {len(dims)} dims")
    if any(d < 2 for d in dims):
        problems.append(f"every modality dim must be >= 2, got {list(dims)}")
    if len(set(modalities)) != len(modalities) or "S" in modalities:
        problems.append(f"modality names must be unique and not 'S': {list(modalities)}")
    if not 2 <= n_clusters <= n_entities:
        problems.append(f"n_clusters must lie in [2, n_entities], got {n_clusters}")
    if not 0.0 < density <= 1.0:
        problems.append(f"density must lie in (0, 1], got {density}")
    if noise < 0:
        problems.append(f"noise must be >= 0, got {noise}")
    if problems:
        raise ConfigError("; ".join(problems))
