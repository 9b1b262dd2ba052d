"""Knowledge-graph data: loading, synthetic generation, and modality imbalance."""

from src.core.data.dataset import (
    SPLITS,
    KnowledgeGraph,
    ModalityFeatureStore,
    load_dataset,
    save_dataset,
)
from src.core.data.imbalance import (
    drop_count,
    drop_manifest,
    group_split,
    perturb,
    write_perturbed_dataset,
)
from src.core.data.synth import gen_synth

__all__ = [
    "SPLITS",
    "KnowledgeGraph",
    "ModalityFeatureStore",
    "drop_count",
    "drop_manifest",
    "gen_synth",
    "group_split",
    "load_dataset",
    "perturb",
    "save_dataset",
    "write_perturbed_dataset",
]
