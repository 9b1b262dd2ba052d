"""Tests for negative sampling, the optimizer, and link-prediction ranking."""

from __future__ import annotations

import numpy as np
import pytest

from src.contracts.config import HyperParams
from src.contracts.errors import DataError, NonFiniteError
from src.core.data.dataset import KnowledgeGraph, load_dataset
from src.core.data.synth import gen_synth
from src.core.model.params import DISCRIMINATOR, ModelLayout, ModelParams
from src.core.model.redaf import fuse, score
from src.core.training.evaluation import (
    LinkPredictor,
    evaluate,
    filtered_rank,
    metrics_from_ranks,
    random_mrr,
    rank_query,
)
from src.core.training.optim import Adam, AdamState, adam_step, wrap_phase
from src.core.training.sampling import negative_sample


class TestNegativeSample:
    def test_shape_and_relation(self, toy_kg) -> None:
        negatives = negative_sample(toy_kg.train, 4, 5, np.random.default_rng(0))
        assert negatives.shape == (6, 4, 3)
        np.testing.assert_array_equal(negatives[:, :, 1], np.repeat(toy_kg.train[:, 1:2], 4, axis=1))

    def test_exactly_one_side_replaced(self, toy_kg) -> None:
        negatives = negative_sample(toy_kg.train, 50, 5, np.random.default_rng(1))
        positives = np.repeat(toy_kg.train[:, None, :], 50, axis=1)
        head_changed = negatives[:, :, 0] != positives[:, :, 0]
        tail_changed = negatives[:, :, 2] != positives[:, :, 2]
        assert np.all(head_changed ^ tail_changed)
        assert negatives.min() >= 0
        assert negatives[:, :, [0, 2]].max() < 5

    def test_both_sides_are_used(self, toy_kg) -> None:
        negatives = negative_sample(toy_kg.train, 50, 5, np.random.default_rng(2))
        assert np.any(negatives[:, :, 0] != toy_kg.train[:, None, 0])
        assert np.any(negatives[:, :, 2] != toy_kg.train[:, None, 2])

    def test_two_entities_always_swap(self) -> None:
        negatives = negative_sample(np.array([[0, 0, 1]]), 20, 2, np.random.default_rng(0))
        for head, _, tail in negatives[0]:
            assert (head, tail) in {(1, 1), (0, 0)}

    def test_seeded(self, toy_kg) -> None:
        a = negative_sample(toy_kg.train, 3, 5, np.random.default_rng(9))
        b = negative_sample(toy_kg.train, 3, 5, np.random.default_rng(9))
        np.testing.assert_array_equal(a, b)

    def test_single_entity(self) -> None:
        with pytest.raises(DataError, match="at least 2 entities"):
            negative_sample(np.array([[0, 0, 0]]), 1, 1, np.random.default_rng(0))


class TestAdam:
    def test_zero_gradient_is_a_no_op(self) -> None:
        params = {"w": np.array([1.0, -2.0])}
        adam_step(params, {"w": np.zeros(2)}, AdamState(), lr=0.1)
        np.testing.assert_array_equal(params["w"], [1.0, -2.0])

    def test_first_step_moves_by_lr(self) -> None:
        params = {"w": np.array([1.0, -2.0, 0.5])}
        adam_step(params, {"w": np.array([3.0, -0.2, 40.0])}, AdamState(), lr=0.01)
        np.testing.assert_allclose(params["w"], [0.99, -1.99, 0.49], atol=1e-8)

    def test_state_advances(self) -> None:
        state = AdamState()
        params = {"w": np.ones(2)}
        for _ in range(3):
            adam_step(params, {"w": np.ones(2)}, state, lr=0.01)
        assert state.t == 3
        assert set(state.m) == {"w"}

    def test_non_finite_gradient(self) -> None:
        params = {"w": np.ones(2)}
        with pytest.raises(NonFiniteError, match="'w'"):
            adam_step(params, {"w": np.array([1.0, np.nan])}, AdamState(), lr=0.01)
        np.testing.assert_array_equal(params["w"], [1.0, 1.0])

    def test_phases_stay_wrapped(self) -> None:
        params = {"relation_phase": np.array([3.1, -3.1])}
        state = AdamState()
        for _ in range(5):
            adam_step(params, {"relation_phase": np.array([-1.0, 1.0])}, state, lr=0.5)
            assert np.all(params["relation_phase"] > -np.pi)
            assert np.all(params["relation_phase"] <= np.pi)

    def test_group_boundary(self, toy_params) -> None:
        optimizer = Adam(toy_params, DISCRIMINATOR, 0.01)
        with pytest.raises(ValueError, match="outside group"):
            optimizer.step({"generator.w1": np.zeros_like(toy_params.tensors["generator.w1"])})


class TestWrapPhase:
    def test_inside_values_untouched(self) -> None:
        theta = np.array([-3.0, 0.0, np.pi])
        assert wrap_phase(theta) is theta

    def test_wraps_outside_values(self) -> None:
        wrapped = wrap_phase(np.array([3.5, -np.pi, -4.0, 0.25]))
        np.testing.assert_allclose(wrapped, [3.5 - 2 * np.pi, np.pi, -4.0 + 2 * np.pi, 0.25])


class TestFilteredRank:
    def test_plain_rank(self) -> None:
        assert filtered_rank(np.array([0.1, 0.5, 0.3]), 2) == 2

    def test_filter_removes_known(self) -> None:
        assert filtered_rank(np.array([0.1, 0.5, 0.3]), 2, {1}) == 1

    def test_truth_is_never_filtered(self) -> None:
        assert filtered_rank(np.array([0.9, 0.5, 0.3]), 1, {0, 1}) == 1

    def test_ties_count_half(self) -> None:
        assert filtered_rank(np.zeros(4), 0) == 2
        assert filtered_rank(np.zeros(5), 3) == 3

    def test_truth_out_of_range(self) -> None:
        with pytest.raises(DataError, match="outside candidate set"):
            filtered_rank(np.zeros(3), 3)


class TestMetrics:
    def test_metrics_from_ranks(self) -> None:
        mrr, hits = metrics_from_ranks([1, 2, 4])
        assert mrr == pytest.approx(7 / 12)
        assert hits == pytest.approx({1: 1 / 3, 3: 2 / 3, 10: 1.0})

    def test_no_ranks(self) -> None:
        with pytest.raises(DataError):
            metrics_from_ranks([])

    def test_random_mrr(self) -> None:
        assert random_mrr(1) == 1.0
        assert random_mrr(2) == pytest.approx(0.75)
        assert random_mrr(4) == pytest.approx((1 + 1 / 2 + 1 / 3 + 1 / 4) / 4)


def _brute_force_ranks(params, kg, store, split: str = "test") -> list[int]:
    view = params.on(None)
    joints: dict[tuple[int, int], np.ndarray] = {}
    known = {tuple(t) for name in ("train", "valid", "test") for t in kg.split(name).tolist()}
    ranks = []
    for head, relation, tail in kg.split(split).tolist():
        theta = params.tensors["relation_phase"][relation : relation + 1]

        def joint(entity: int, relation: int = relation) -> np.ndarray:
            if (entity, relation) not in joints:
                joints[entity, relation] = fuse(view, store, np.array([entity]), np.array([relation])).vector.data
            return joints[entity, relation]

        for side, truth in (("head", head), ("tail", tail)):
            scores = []
            for candidate in range(kg.n_entities):
                h, t = (candidate, tail) if side == "head" else (head, candidate)
                scores.append(score(joint(h), theta, joint(t)).item())
            target = scores[truth]
            others = [
                s
                for c, s in enumerate(scores)
                if c != truth
                and ((c, relation, tail) if side == "head" else (head, relation, c)) not in known
            ]
            greater = sum(s > target for s in others)
            ties = sum(s == target for s in others)
            ranks.append(1 + greater + ties // 2)
    return ranks


class TestEvaluate:
    def test_matches_brute_force(self, toy_params, toy_kg, toy_store) -> None:
        report = evaluate(toy_params, toy_kg, toy_store)
        mrr, hits = metrics_from_ranks(_brute_force_ranks(toy_params, toy_kg, toy_store))
        assert report.n_queries == 6
        assert report.mrr == pytest.approx(mrr)
        assert report.hits == pytest.approx(hits)

    def test_matches_brute_force_on_synthetic_graph(self, synth_dir) -> None:
        kg, store = load_dataset(synth_dir)
        layout = ModelLayout.from_store(store, 6)
        params = ModelParams.initialize(
            layout, kg.n_entities, kg.n_relations, HyperParams(d_e=6, noise_dim=2), 11
        )
        report = evaluate(params, kg, store, "valid")
        mrr, _ = metrics_from_ranks(_brute_force_ranks(params, kg, store, "valid"))
        assert report.mrr == pytest.approx(mrr)

    def test_every_query_matches_brute_force(self, tmp_path) -> None:
        kg, store = load_dataset(gen_synth(tmp_path / "s50", n_entities=50, n_relations=3, dims=(6, 6), seed=5))
        layout = ModelLayout.from_store(store, 6)
        params = ModelParams.initialize(
            layout, kg.n_entities, kg.n_relations, HyperParams(d_e=6, noise_dim=2), 19
        )
        predictor = LinkPredictor(params, store)
        ranks = [
            rank_query(predictor, kg, triple, side) for triple in kg.triples("test") for side in ("head", "tail")
        ]
        assert len(kg.triples("test")) > 0
        assert ranks == _brute_force_ranks(params, kg, store, "test")

    def test_rank_query_bounds(self, toy_params, toy_kg, toy_store) -> None:
        predictor = LinkPredictor(toy_params, toy_store)
        for triple in toy_kg.triples("test"):
            for side in ("head", "tail"):
                assert 1 <= rank_query(predictor, toy_kg, triple, side) <= toy_kg.n_entities

    def test_threads_do_not_change_metrics(self, toy_params, toy_kg, toy_store) -> None:
        serial = evaluate(toy_params, toy_kg, toy_store)
        parallel = evaluate(toy_params, toy_kg, toy_store, threads=3)
        assert parallel.mrr == serial.mrr
        assert parallel.hits == serial.hits

    def test_groups_partition_queries(self, toy_params, toy_kg, toy_store) -> None:
        report = evaluate(toy_params, toy_kg, toy_store, groups=True)
        assert set(report.groups) == {"Group1", "Group2"}
        assert report.groups["Group1"].n_queries == 4
        assert report.groups["Group2"].n_queries == 2
        assert sum(g.n_queries for g in report.groups.values()) == report.n_queries

    def test_no_guidance_shares_one_joint_table(self, toy_kg, toy_store) -> None:
        layout = ModelLayout.from_store(toy_store, 4)
        params = ModelParams.initialize(
            layout, 5, 2, HyperParams(d_e=4, noise_dim=3), 0, relation_guidance=False
        )
        predictor = LinkPredictor(params, toy_store)
        assert predictor.joint(0) is predictor.joint(1)

    def test_empty_split(self, toy_params, toy_store) -> None:
        kg = KnowledgeGraph.build(["a", "b", "c", "d", "e"], ["r", "s"], train=[(0, 0, 1)])
        with pytest.raises(DataError, match="split is empty"):
            evaluate(toy_params, kg, toy_store)

    def test_report_omits_timing_from_json(self, toy_params, toy_kg, toy_store) -> None:
        report = evaluate(toy_params, toy_kg, toy_store, groups=True)
        assert "wall_clock_seconds" not in report.to_json()
