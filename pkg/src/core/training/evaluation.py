"""Filtered link-prediction evaluation.

Every test triple yields a tail query (h, r, ?) and a head query
(?, r, t). All entities are candidates; candidates that complete a
known triple from any split are removed, except the ground truth.
"""

from __future__ import annotations

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from typing import TYPE_CHECKING, Literal

import numpy as np

from src.contracts.data import GroupLabel, Triple
from src.contracts.errors import DataError
from src.contracts.metrics import MetricsReport
from src.core.data.imbalance import group_split
from src.core.model.redaf import fuse, score

if TYPE_CHECKING:
    from collections.abc import Iterable, Sequence

    from src.contracts.metrics import EpochLosses
    from src.core.autodiff import Tensor
    from src.core.data.dataset import KnowledgeGraph, ModalityFeatureStore
    from src.core.model.params import ModelParams

logger = logging.getLogger(__name__)

HITS_AT = (1, 3, 10)
Side = Literal["head", "tail"]


def filtered_rank(scores: np.ndarray, truth: int, known: Iterable[int] = ()) -> int:
    """Rank of ``scores[truth]`` among unfiltered candidates.

    Ties count half, rounded down: ``1 + #greater + #ties // 2``.

    Raises:
        DataError: If ``truth`` is not a candidate index.
    """
    if not 0 <= truth < len(scores):
        msg = f"ground-truth entity {truth} outside candidate set of size {len(scores)}"
        raise DataError(msg)
    keep = np.ones(len(scores), dtype=bool)
    keep[list(known)] = False
    keep[truth] = False
    others = scores[keep]
    target = scores[truth]
    return 1 + int((others > target).sum()) + int((others == target).sum()) // 2


class LinkPredictor:
    """Frozen model that scores every entity as a head or tail candidate.

    Joint embeddings of all entities depend on the relation through the
    fusion temperature, so they are computed once per relation and
    cached. Call ``precompute`` before sharing across threads.
    """

    def __init__(self, params: ModelParams, store: ModalityFeatureStore) -> None:
        self.params = params
        self.store = store
        self.view = params.on(None)
        self._joint: dict[int, Tensor] = {}
        self._all = np.arange(params.n_entities)

    def _key(self, relation: int) -> int:
        return relation if self.params.relation_guidance else -1

    def joint(self, relation: int) -> Tensor:
        key = self._key(relation)
        if key not in self._joint:
            relations = np.full(len(self._all), relation)
            self._joint[key] = fuse(self.view, self.store, self._all, relations).vector
        return self._joint[key]

    def precompute(self, relations: Iterable[int]) -> None:
        for relation in sorted(set(relations)):
            self.joint(relation)

    def _theta(self, relation: int) -> np.ndarray:
        return self.params.tensors["relation_phase"][relation : relation + 1]

    def tail_scores(self, head: int, relation: int) -> np.ndarray:
        joint = self.joint(relation).data
        return score(joint[head : head + 1], self._theta(relation), joint).data

    def head_scores(self, relation: int, tail: int) -> np.ndarray:
        joint = self.joint(relation).data
        return score(joint, self._theta(relation), joint[tail : tail + 1]).data


def rank_query(predictor: LinkPredictor, kg: KnowledgeGraph, triple: Triple, side: Side) -> int:
    """Filtered rank of the missing ``side`` of ``triple``."""
    head, relation, tail = triple
    if side == "tail":
        return filtered_rank(
            predictor.tail_scores(head, relation), tail, kg.known_tails(head, relation)
        )
    return filtered_rank(predictor.head_scores(relation, tail), head, kg.known_heads(relation, tail))


def metrics_from_ranks(ranks: Sequence[int]) -> tuple[float, dict[int, float]]:
    """MRR and Hits@{1,3,10} of a list of ranks."""
    if not ranks:
        msg = "no ranks to aggregate"
        raise DataError(msg)
    array = np.asarray(ranks, dtype=np.float64)
    mrr = float(np.mean(1.0 / array))
    return mrr, {k: float(np.mean(array <= k)) for k in HITS_AT}


def random_mrr(n_candidates: int) -> float:
    """Expected MRR of a uniformly random ranking: ``H(n) / n``."""
    return float(np.sum(1.0 / np.arange(1, n_candidates + 1)) / n_candidates)


def _rank_shard(predictor: LinkPredictor, kg: KnowledgeGraph, shard: list[Triple]) -> list[int]:
    ranks = []
    for triple in shard:
        ranks.append(rank_query(predictor, kg, triple, "head"))
        ranks.append(rank_query(predictor, kg, triple, "tail"))
    return ranks


def evaluate(
    params: ModelParams,
    kg: KnowledgeGraph,
    store: ModalityFeatureStore,
    split: str = "test",
    *,
    groups: bool = False,
    threads: int = 1,
    loss_curve: list[EpochLosses] | None = None,
) -> MetricsReport:
    """Filtered MRR and Hits@K over both query directions of a split.

    Args:
        params: Trained (frozen) parameters.
        kg: Graph providing the split and the filter index.
        store: Features restricted to the model's modalities.
        split: "valid" or "test".
        groups: Add Group1/2/3 sub-reports by modality completeness.
        threads: Worker threads; shards are merged in query order.
        loss_curve: Optional training curve to attach to the report.

    Raises:
        DataError: If the split is empty.
    """
    triples = kg.triples(split)
    if not triples:
        msg = f"Cannot evaluate: {split} split is empty"
        raise DataError(msg)
    start = time.perf_counter()
    predictor = LinkPredictor(params, store)
    predictor.precompute(t.relation for t in triples)

    shards = [s.tolist() for s in np.array_split(np.arange(len(triples)), max(1, threads))]
    shards = [[triples[i] for i in shard] for shard in shards if shard]
    if threads > 1 and len(shards) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda shard: _rank_shard(predictor, kg, shard), shards))
    else:
        results = [_rank_shard(predictor, kg, shard) for shard in shards]
    ranks = [rank for shard in results for rank in shard]

    sub_reports: dict[str, MetricsReport] = {}
    if groups:
        labels = group_split(kg, store, split)
        for label in GroupLabel:
            selected = [
                r
                for i, triple in enumerate(triples)
                if labels[triple] is label
                for r in ranks[2 * i : 2 * i + 2]
            ]
            if selected:
                mrr, hits = metrics_from_ranks(selected)
                sub_reports[label.value] = MetricsReport(mrr=mrr, hits=hits, n_queries=len(selected))

    mrr, hits = metrics_from_ranks(ranks)
    elapsed = time.perf_counter() - start
    logger.info(
        "Evaluated %d %s queries with %d thread(s): MRR=%.4f Hits@10=%.4f (%.1fs)",
        len(ranks),
        split,
        threads,
        mrr,
        hits[10],
        elapsed,
    )
    return MetricsReport(
        mrr=mrr,
        hits=hits,
        n_queries=len(ranks),
        groups=sub_reports,
        loss_curve=list(loss_curve or []),
        wall_clock_seconds=elapsed,
    )
