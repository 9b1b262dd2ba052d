"""Modality-imbalance perturbations and completeness groups."""

from __future__ import annotations

import logging
import shutil
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path
from typing import TYPE_CHECKING

from src.contracts.data import DropManifest, GroupLabel, ImbalanceSpec, Triple
from src.contracts.errors import DataError
from src.core.data.dataset import SPLITS
from src.utils.seeding import stream

if TYPE_CHECKING:
    from src.core.data.dataset import KnowledgeGraph, ModalityFeatureStore

logger = logging.getLogger(__name__)


def drop_count(eta: float, count: int) -> int:
    """``round(eta * count)`` with halves rounded away from zero."""
    exact = Decimal(repr(float(eta))) * count
    return int(exact.quantize(Decimal(1), rounding=ROUND_HALF_UP))


def perturb(
    store: ModalityFeatureStore,
    kg: KnowledgeGraph,
    spec: ImbalanceSpec,
) -> ModalityFeatureStore:
    """Drop modality information.

    Entity level removes every entry of ``drop_count(eta, |E|)`` entities.
    Modality level removes ``drop_count(eta, present_m)`` entries of each
    modality independently. The structural modality is never touched.
    """
    if not store.entries() or not store.specs:
        msg = "perturb: feature store is empty"
        raise DataError(msg)
    drops = _entity_drops(store, kg, spec) if spec.level == "entity" else _modality_drops(store, spec)
    logger.info(
        "Perturbed store: level=%s eta=%.3f removed %d entries",
        spec.level,
        spec.eta,
        len(drops),
    )
    return store.without(drops)


def dropped_entities(kg: KnowledgeGraph, spec: ImbalanceSpec) -> list[int]:
    """Entities chosen by an entity-level drop, sorted."""
    n = drop_count(spec.eta, kg.n_entities)
    rng = stream(spec.seed, "perturb")
    return sorted(rng.choice(kg.n_entities, size=n, replace=False).tolist())


def _entity_drops(
    store: ModalityFeatureStore, kg: KnowledgeGraph, spec: ImbalanceSpec
) -> list[tuple[int, str]]:
    chosen = dropped_entities(kg, spec)
    return [(e, m) for e in chosen for m in store.names if store.has(e, m)]


def _modality_drops(
    store: ModalityFeatureStore, spec: ImbalanceSpec
) -> list[tuple[int, str]]:
    drops = []
    for index, name in enumerate(store.names):
        present = sorted(store.features.get(name, {}))
        n = drop_count(spec.eta, len(present))
        rng = stream(spec.seed, "perturb", index)
        picked = rng.choice(len(present), size=n, replace=False) if n else []
        drops.extend((present[i], name) for i in sorted(int(i) for i in picked))
    return drops


def drop_manifest(
    kg: KnowledgeGraph,
    before: ModalityFeatureStore,
    after: ModalityFeatureStore,
    spec: ImbalanceSpec,
) -> DropManifest:
    """Describe the difference between two stores."""
    kept = set(after.entries())
    removed = [(e, m) for e, m in before.entries() if (e, m) not in kept]
    entities = dropped_entities(kg, spec) if spec.level == "entity" else []
    return DropManifest(
        level=spec.level,
        eta=spec.eta,
        seed=spec.seed,
        entities=[kg.entities[e] for e in entities],
        entries=[(kg.entities[e], m) for e, m in removed],
    )


def group_split(
    kg: KnowledgeGraph,
    store: ModalityFeatureStore,
    split: str = "test",
) -> dict[Triple, GroupLabel]:
    """Label each triple of a split by the modality completeness of h and t.

    An entity is complete when it has an entry for every declared
    modality of ``store``.
    """
    if len(kg.split(split)) == 0:
        msg = f"group_split: {split} split is empty"
        raise DataError(msg)
    labels = {}
    for triple in kg.triples(split):
        incomplete = (not store.is_complete(triple.head)) + (not store.is_complete(triple.tail))
        labels[triple] = (GroupLabel.GROUP1, GroupLabel.GROUP2, GroupLabel.GROUP3)[incomplete]
    return labels


def write_perturbed_dataset(
    source: str | Path,
    target: str | Path,
    kg: KnowledgeGraph,
    after: ModalityFeatureStore,
    manifest: DropManifest,
) -> Path:
    """Copy a dataset directory, keeping only the surviving feature lines.

    Kept lines are copied verbatim, so an empty drop reproduces the
    feature files byte for byte.
    """
    source, target = Path(source), Path(target)
    (target / "features").mkdir(parents=True, exist_ok=True)
    for name in ("entities.tsv", "relations.tsv", "manifest.json", *(f"{s}.tsv" for s in SPLITS)):
        shutil.copyfile(source / name, target / name)

    for modality in after.names:
        src = source / "features" / f"{modality}.tsv"
        if not src.exists():
            continue
        with src.open(encoding="utf-8", newline="") as fin, (
            target / "features" / f"{modality}.tsv"
        ).open("w", encoding="utf-8", newline="") as fout:
            for line in fin:
                name = line.partition("\t")[0].strip()
                entity = kg.entity_ids.get(name)
                if not line.strip() or (entity is not None and after.has(entity, modality)):
                    fout.write(line)

    (target / "dropped.json").write_text(manifest.model_dump_json(indent=2) + "\n", encoding="utf-8")
    logger.info(
        "Wrote perturbed dataset to %s (%d entries dropped)", target, len(manifest.entries)
    )
    return target
