"""Contracts: type definitions and protocols for the toolkit.

This package is the single source of truth for configuration models,
data records, metrics, and protocol definitions. All other packages
import types from here.

Zero internal dependencies.
"""

from src.contracts.algorithms import AdversarialObjective
from src.contracts.checkpoint import CheckpointManifest, TensorEntry
from src.contracts.config import STRUCTURAL, AblationFlags, HyperParams, RunConfig
from src.contracts.data import (
    DatasetManifest,
    DropManifest,
    GroupLabel,
    ImbalanceSpec,
    ModalitySpec,
    Triple,
)
from src.contracts.errors import (
    CheckpointError,
    ConfigError,
    DataError,
    NativeError,
    NonFiniteError,
    ShapeError,
)
from src.contracts.events import RunEvent
from src.contracts.metrics import EpochLosses, MetricsReport

__all__ = [
    "STRUCTURAL",
    "AblationFlags",
    "AdversarialObjective",
    "CheckpointError",
    "CheckpointManifest",
    "ConfigError",
    "DataError",
    "DatasetManifest",
    "DropManifest",
    "EpochLosses",
    "GroupLabel",
    "HyperParams",
    "ImbalanceSpec",
    "MetricsReport",
    "ModalitySpec",
    "NativeError",
    "NonFiniteError",
    "RunConfig",
    "RunEvent",
    "ShapeError",
    "TensorEntry",
    "Triple",
]
