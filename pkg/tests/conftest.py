"""Shared pytest fixtures for all test levels."""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest
import yaml

from src.contracts.config import RunConfig
from src.contracts.data import ModalitySpec
from src.core.data.dataset import KnowledgeGraph, ModalityFeatureStore, save_dataset
from src.core.data.synth import gen_synth
from src.core.model.params import ModelLayout, ModelParams

TOY_ENTITIES = ("alice", "bob", "carol", "dave", "erin")
TOY_RELATIONS = ("knows", "likes")


@pytest.fixture
def toy_kg() -> KnowledgeGraph:
    """5 entities, 2 relations, a handful of triples in every split."""
    return KnowledgeGraph.build(
        TOY_ENTITIES,
        TOY_RELATIONS,
        train=[(0, 0, 1), (1, 0, 2), (2, 1, 3), (3, 1, 4), (0, 1, 2), (4, 0, 0)],
        valid=[(1, 1, 3)],
        test=[(0, 0, 2), (2, 0, 4), (3, 1, 0)],
    )


@pytest.fixture
def toy_store() -> ModalityFeatureStore:
    """Two modalities; entity 4 has no T feature."""
    rng = np.random.default_rng(0)
    specs = (ModalitySpec(name="I", dim=3), ModalitySpec(name="T", dim=4))
    features = {
        "I": {e: rng.normal(size=3) for e in range(5)},
        "T": {e: rng.normal(size=4) for e in range(4)},
    }
    return ModalityFeatureStore(specs=specs, features=features)


@pytest.fixture
def toy_dataset_dir(toy_kg, toy_store, tmp_path) -> Path:
    """The toy graph and store written in dataset-directory layout."""
    return save_dataset(toy_kg, toy_store, tmp_path / "toy")


@pytest.fixture
def toy_config(tmp_path) -> RunConfig:
    """Tiny hyperparameters that keep every step fast."""
    return RunConfig(
        d_e=4,
        gamma=2.0,
        beta=1.0,
        num_negatives=3,
        noise_dim=3,
        lr_d=0.01,
        lr_g=0.01,
        batch_size=4,
        epochs=2,
        lambda1=0.1,
        lambda2=0.1,
        seed=3,
        out_dir=str(tmp_path / "run"),
    )


@pytest.fixture
def toy_params(toy_kg, toy_store, toy_config) -> ModelParams:
    layout = ModelLayout.from_store(toy_store, toy_config.d_e)
    return ModelParams.initialize(
        layout, toy_kg.n_entities, toy_kg.n_relations, toy_config.hyperparams(), toy_config.seed
    )


@pytest.fixture(scope="session")
def synth_dir(tmp_path_factory) -> Path:
    """A small planted-structure dataset shared across tests."""
    root = tmp_path_factory.mktemp("synth")
    return gen_synth(root / "data", n_entities=30, n_relations=3, dims=(6, 6), seed=7)


@pytest.fixture
def toy_config_file(toy_dataset_dir, tmp_path) -> Path:
    """Sectioned YAML config pointing at the toy dataset."""
    raw = {
        "run": {"seed": 3, "out_dir": str(tmp_path / "run")},
        "kg_data": {"data_dir": str(toy_dataset_dir)},
        "redaf": {"d_e": 4, "gamma": 2.0, "num_negatives": 3},
        "comat": {"noise_dim": 3, "lr_g": 0.01},
        "train_eval": {"batch_size": 4, "epochs": 2, "lr_d": 0.01},
    }
    path = tmp_path / "toy.yaml"
    path.write_text(yaml.safe_dump(raw), encoding="utf-8")
    return path
