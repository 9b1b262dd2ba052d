"""Knowledge graphs, modality feature stores, and their on-disk layout.

A dataset directory holds::

    entities.tsv          one name per line, line number = id
    relations.tsv         same convention
    train.tsv, valid.tsv, test.tsv
                          head<TAB>relation<TAB>tail, by name
    features/<m>.tsv      name<TAB>v1 v2 ... v_dm
    manifest.json         {"modalities": [{"name": ..., "dim": ...}]}
"""

from __future__ import annotations

import json
import logging
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING

import numpy as np
from pydantic import ValidationError

from src.contracts.data import DatasetManifest, ModalitySpec, Triple
from src.contracts.errors import DataError

if TYPE_CHECKING:
    from collections.abc import Iterable, Mapping

logger = logging.getLogger(__name__)

SPLITS = ("train", "valid", "test")


@dataclass(frozen=True)
class KnowledgeGraph:
    """Vocabularies, splits, and the filtered-setting index.

    Splits are (n, 3) int64 arrays of (head, relation, tail) ids. The
    filter index spans train, valid, and test.
    """

    entities: tuple[str, ...]
    relations: tuple[str, ...]
    train: np.ndarray
    valid: np.ndarray
    test: np.ndarray
    entity_ids: dict[str, int] = field(repr=False, compare=False)
    relation_ids: dict[str, int] = field(repr=False, compare=False)
    tail_filter: dict[tuple[int, int], frozenset[int]] = field(repr=False, compare=False)
    head_filter: dict[tuple[int, int], frozenset[int]] = field(repr=False, compare=False)

    @classmethod
    def build(
        cls,
        entities: Iterable[str],
        relations: Iterable[str],
        train: Iterable[Iterable[int]],
        valid: Iterable[Iterable[int]] = (),
        test: Iterable[Iterable[int]] = (),
    ) -> KnowledgeGraph:
        """Create a graph from names and id triples, validating ids."""
        entities, relations = tuple(entities), tuple(relations)
        splits = {
            name: _as_triples(rows, len(entities), len(relations), name)
            for name, rows in zip(SPLITS, (train, valid, test), strict=True)
        }

        tails: dict[tuple[int, int], set[int]] = defaultdict(set)
        heads: dict[tuple[int, int], set[int]] = defaultdict(set)
        for array in splits.values():
            for h, r, t in array.tolist():
                tails[(h, r)].add(t)
                heads[(r, t)].add(h)

        return cls(
            entities=entities,
            relations=relations,
            entity_ids={name: i for i, name in enumerate(entities)},
            relation_ids={name: i for i, name in enumerate(relations)},
            tail_filter={k: frozenset(v) for k, v in tails.items()},
            head_filter={k: frozenset(v) for k, v in heads.items()},
            **splits,
        )

    @property
    def n_entities(self) -> int:
        return len(self.entities)

    @property
    def n_relations(self) -> int:
        return len(self.relations)

    def split(self, name: str) -> np.ndarray:
        if name not in SPLITS:
            msg = f"Unknown split '{name}'. Available: {', '.join(SPLITS)}"
            raise KeyError(msg)
        return getattr(self, name)

    def triples(self, name: str) -> list[Triple]:
        return [Triple(*row) for row in self.split(name).tolist()]

    def known_tails(self, head: int, relation: int) -> frozenset[int]:
        return self.tail_filter.get((head, relation), frozenset())

    def known_heads(self, relation: int, tail: int) -> frozenset[int]:
        return self.head_filter.get((relation, tail), frozenset())


def _as_triples(
    rows: Iterable[Iterable[int]], n_entities: int, n_relations: int, split: str
) -> np.ndarray:
    array = np.array([tuple(row) for row in rows], dtype=np.int64).reshape(-1, 3)
    if array.size:
        ents = array[:, [0, 2]]
        if ents.min() < 0 or ents.max() >= n_entities:
            msg = f"{split}: entity id out of vocabulary"
            raise DataError(msg)
        if array[:, 1].min() < 0 or array[:, 1].max() >= n_relations:
            msg = f"{split}: relation id out of vocabulary"
            raise DataError(msg)
    array.flags.writeable = False
    return array


@dataclass(frozen=True)
class ModalityFeatureStore:
    """Raw per-entity feature vectors for each declared modality.

    Missing modality information is the absence of a key; it is never
    filled in here.
    """

    specs: tuple[ModalitySpec, ...]
    features: Mapping[str, Mapping[int, np.ndarray]]
    _dense: dict[tuple[str, int], tuple[np.ndarray, np.ndarray]] = field(
        default_factory=dict, repr=False, compare=False
    )

    def __post_init__(self) -> None:
        for spec in self.specs:
            for entity, vector in self.features.get(spec.name, {}).items():
                if vector.shape != (spec.dim,):
                    msg = (
                        f"modality '{spec.name}': entity {entity} has "
                        f"{vector.shape[0]} values, expected {spec.dim}"
                    )
                    raise DataError(msg)

    @property
    def names(self) -> list[str]:
        return [spec.name for spec in self.specs]

    def dim(self, modality: str) -> int:
        for spec in self.specs:
            if spec.name == modality:
                return spec.dim
        msg = f"Undeclared modality '{modality}'. Declared: {', '.join(self.names)}"
        raise KeyError(msg)

    def get(self, entity: int, modality: str) -> np.ndarray | None:
        self.dim(modality)
        return self.features.get(modality, {}).get(entity)

    def has(self, entity: int, modality: str) -> bool:
        return entity in self.features.get(modality, {})

    def count(self, modality: str) -> int:
        return len(self.features.get(modality, {}))

    def entries(self) -> list[tuple[int, str]]:
        """All present (entity, modality) pairs in declaration order."""
        return [
            (entity, name)
            for name in self.names
            for entity in sorted(self.features.get(name, {}))
        ]

    def is_complete(self, entity: int) -> bool:
        return all(self.has(entity, name) for name in self.names)

    def without(self, drops: Iterable[tuple[int, str]]) -> ModalityFeatureStore:
        """Return a copy with the given (entity, modality) entries removed."""
        removed: dict[str, set[int]] = defaultdict(set)
        for entity, modality in drops:
            removed[modality].add(entity)
        features = {
            name: {
                e: v for e, v in self.features.get(name, {}).items()
                if e not in removed[name]
            }
            for name in self.names
        }
        return ModalityFeatureStore(specs=self.specs, features=features)

    def select(self, modalities: Iterable[str]) -> ModalityFeatureStore:
        """Restrict to a subset of the declared modalities, keeping order."""
        wanted = set(modalities)
        for name in wanted:
            self.dim(name)
        specs = tuple(s for s in self.specs if s.name in wanted)
        return ModalityFeatureStore(
            specs=specs,
            features={s.name: self.features.get(s.name, {}) for s in specs},
        )

    def dense(self, modality: str, n_entities: int) -> tuple[np.ndarray, np.ndarray]:
        """Features as an (n_entities, dim) matrix plus a presence mask.

        Rows of missing entities are zero in the matrix and False in the
        mask; callers must consult the mask.
        """
        key = (modality, n_entities)
        if key not in self._dense:
            dim = self.dim(modality)
            matrix = np.zeros((n_entities, dim))
            mask = np.zeros(n_entities, dtype=bool)
            for entity, vector in self.features.get(modality, {}).items():
                matrix[entity] = vector
                mask[entity] = True
            matrix.flags.writeable = False
            mask.flags.writeable = False
            self._dense[key] = (matrix, mask)
        return self._dense[key]


def load_dataset(directory: str | Path) -> tuple[KnowledgeGraph, ModalityFeatureStore]:
    """Load a dataset directory.

    Raises:
        DataError: On missing files, unknown names, malformed lines, or
            feature dimension mismatches. Messages name file and line.
    """
    root = Path(directory)
    if not root.is_dir():
        msg = f"Dataset directory not found: {root}"
        raise DataError(msg)

    manifest = _read_manifest(root / "manifest.json")
    entities = _read_vocab(root / "entities.tsv")
    relations = _read_vocab(root / "relations.tsv")
    entity_ids = {name: i for i, name in enumerate(entities)}
    relation_ids = {name: i for i, name in enumerate(relations)}

    splits = {
        split: _read_triples(root / f"{split}.tsv", entity_ids, relation_ids)
        for split in SPLITS
    }
    kg = KnowledgeGraph.build(entities, relations, **splits)

    features = {
        spec.name: _read_features(root / "features" / f"{spec.name}.tsv", spec, entity_ids)
        for spec in manifest.modalities
    }
    _warn_undeclared(root / "features", manifest)
    store = ModalityFeatureStore(specs=tuple(manifest.modalities), features=features)

    logger.info(
        "Loaded %s: |E|=%d |R|=%d train=%d valid=%d test=%d modalities=%s",
        root,
        kg.n_entities,
        kg.n_relations,
        len(kg.train),
        len(kg.valid),
        len(kg.test),
        ",".join(f"{s.name}({store.count(s.name)})" for s in manifest.modalities),
    )
    return kg, store


def save_dataset(
    kg: KnowledgeGraph,
    store: ModalityFeatureStore,
    directory: str | Path,
) -> Path:
    """Write a dataset directory in the layout read by ``load_dataset``."""
    root = Path(directory)
    (root / "features").mkdir(parents=True, exist_ok=True)

    _write_lines(root / "entities.tsv", kg.entities)
    _write_lines(root / "relations.tsv", kg.relations)
    for split in SPLITS:
        _write_lines(
            root / f"{split}.tsv",
            (
                f"{kg.entities[h]}\t{kg.relations[r]}\t{kg.entities[t]}"
                for h, r, t in kg.split(split).tolist()
            ),
        )
    for spec in store.specs:
        rows = store.features.get(spec.name, {})
        _write_lines(
            root / "features" / f"{spec.name}.tsv",
            (
                f"{kg.entities[e]}\t{' '.join(repr(float(v)) for v in rows[e])}"
                for e in sorted(rows)
            ),
        )
    manifest = DatasetManifest(modalities=list(store.specs))
    (root / "manifest.json").write_text(
        manifest.model_dump_json(indent=2) + "\n", encoding="utf-8"
    )
    return root


def _read_manifest(path: Path) -> DatasetManifest:
    if not path.exists():
        msg = f"Missing manifest: {path}"
        raise DataError(msg)
    try:
        manifest = DatasetManifest(**json.loads(path.read_text(encoding="utf-8")))
    except (json.JSONDecodeError, ValidationError, TypeError) as exc:
        msg = f"{path}: invalid manifest ({exc})"
        raise DataError(msg) from exc
    names = [spec.name for spec in manifest.modalities]
    if len(set(names)) != len(names):
        msg = f"{path}: duplicate modality names {names}"
        raise DataError(msg)
    return manifest


def _lines(path: Path) -> list[tuple[int, str]]:
    if not path.exists():
        msg = f"Missing dataset file: {path}"
        raise DataError(msg)
    with path.open(encoding="utf-8") as f:
        return [
            (lineno, line.rstrip("\n").rstrip("\r"))
            for lineno, line in enumerate(f, start=1)
            if line.strip()
        ]


def _read_vocab(path: Path) -> list[str]:
    names: list[str] = []
    seen: set[str] = set()
    for lineno, line in _lines(path):
        name = line.strip()
        if name in seen:
            msg = f"{path}:{lineno}: duplicate name '{name}'"
            raise DataError(msg)
        seen.add(name)
        names.append(name)
    return names


def _read_triples(
    path: Path,
    entity_ids: dict[str, int],
    relation_ids: dict[str, int],
) -> list[tuple[int, int, int]]:
    triples = []
    for lineno, line in _lines(path):
        fields = line.split("\t")
        if len(fields) != 3:
            msg = f"{path}:{lineno}: expected 3 tab-separated fields, got {len(fields)}"
            raise DataError(msg)
        head, relation, tail = (f.strip() for f in fields)
        for name, vocab, kind in (
            (head, entity_ids, "entity"),
            (relation, relation_ids, "relation"),
            (tail, entity_ids, "entity"),
        ):
            if name not in vocab:
                msg = f"{path}:{lineno}: unknown {kind} '{name}'"
                raise DataError(msg)
        triples.append((entity_ids[head], relation_ids[relation], entity_ids[tail]))
    return triples


def _read_features(
    path: Path,
    spec: ModalitySpec,
    entity_ids: dict[str, int],
) -> dict[int, np.ndarray]:
    if not path.exists():
        logger.warning("No feature file for modality '%s': %s", spec.name, path)
        return {}
    rows: dict[int, np.ndarray] = {}
    for lineno, line in _lines(path):
        name, sep, values = line.partition("\t")
        if not sep:
            msg = f"{path}:{lineno}: expected name<TAB>values"
            raise DataError(msg)
        name = name.strip()
        if name not in entity_ids:
            msg = f"{path}:{lineno}: unknown entity '{name}'"
            raise DataError(msg)
        try:
            vector = np.array([float(v) for v in values.split()], dtype=np.float64)
        except ValueError as exc:
            msg = f"{path}:{lineno}: unparseable feature value ({exc})"
            raise DataError(msg) from exc
        if vector.shape[0] != spec.dim:
            msg = (
                f"{path}:{lineno}: dimension mismatch for modality '{spec.name}': "
                f"got {vector.shape[0]}, expected {spec.dim}"
            )
            raise DataError(msg)
        if not np.all(np.isfinite(vector)):
            msg = f"{path}:{lineno}: non-finite feature value"
            raise DataError(msg)
        entity = entity_ids[name]
        if entity in rows:
            msg = f"{path}:{lineno}: duplicate entry for entity '{name}'"
            raise DataError(msg)
        vector.flags.writeable = False
        rows[entity] = vector
    return rows


def _warn_undeclared(features_dir: Path, manifest: DatasetManifest) -> None:
    if not features_dir.is_dir():
        return
    declared = {spec.name for spec in manifest.modalities}
    for path in sorted(features_dir.glob("*.tsv")):
        if path.stem not in declared:
            logger.warning("Ignoring undeclared modality file: %s", path)


def _write_lines(path: Path, lines: Iterable[str]) -> None:
    with path.open("w", encoding="utf-8", newline="\n") as f:
        for line in lines:
            f.write(line + "\n")
