"""Checkpoint directories: a JSON manifest plus one binary file per tensor.

Tensor file layout (little-endian): the magic ``NKGT``, a u32 rank,
``rank`` u32 dimensions, then the float64 values in row-major order.
"""

from __future__ import annotations

import logging
import struct
from pathlib import Path
from typing import TYPE_CHECKING, Any

import numpy as np
from pydantic import ValidationError

from src.contracts.checkpoint import CheckpointManifest, TensorEntry
from src.contracts.errors import CheckpointError
from src.core.model.params import ModelLayout, ModelParams

if TYPE_CHECKING:
    from src.contracts.config import RunConfig

logger = logging.getLogger(__name__)

MAGIC = b"NKGT"
MANIFEST = "manifest.json"
SUFFIX = ".nkgt"


def encode_tensor(array: np.ndarray) -> bytes:
    # rank-0 tensors stay rank 0 in the header
    array = np.asarray(array, dtype="<f8")
    header = MAGIC + struct.pack(f"<I{array.ndim}I", array.ndim, *array.shape)
    return header + array.tobytes(order="C")


def decode_tensor(blob: bytes, name: str = "tensor") -> np.ndarray:
    """Parse one tensor file.

    Raises:
        CheckpointError: On a bad magic, truncated header, or size mismatch.
    """
    if blob[:4] != MAGIC:
        msg = f"{name}: bad magic {blob[:4]!r}"
        raise CheckpointError(msg)
    if len(blob) < 8:
        msg = f"{name}: truncated header"
        raise CheckpointError(msg)
    (rank,) = struct.unpack_from("<I", blob, 4)
    offset = 8 + 4 * rank
    if len(blob) < offset:
        msg = f"{name}: truncated header"
        raise CheckpointError(msg)
    shape = struct.unpack_from(f"<{rank}I", blob, 8)
    expected = offset + 8 * int(np.prod(shape, dtype=np.int64))
    if len(blob) != expected:
        msg = f"{name}: expected {expected} bytes, found {len(blob)}"
        raise CheckpointError(msg)
    return np.frombuffer(blob, dtype="<f8", offset=offset).reshape(shape).astype(np.float64)


def save_checkpoint(
    params: ModelParams,
    directory: str | Path,
    config: RunConfig,
    epoch: int = 0,
) -> Path:
    """Write every parameter tensor plus the manifest under ``directory``."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    entries = []
    for name, array in params.tensors.items():
        (directory / f"{name}{SUFFIX}").write_bytes(encode_tensor(array))
        entries.append(TensorEntry(name=name, group=params.groups[name], shape=list(array.shape)))
    manifest = CheckpointManifest(
        d_e=params.layout.d_e,
        modalities=list(params.layout.modalities),
        feature_dims=dict(params.layout.feature_dims),
        n_entities=params.n_entities,
        n_relations=params.n_relations,
        seed=params.seed,
        missing_policy=params.missing_policy,
        relation_guidance=params.relation_guidance,
        epoch=epoch,
        data_dir=config.data_dir,
        hyperparams=config.hyperparams().model_dump(),
        flags=config.flags.model_dump(),
        tensors=entries,
    )
    (directory / MANIFEST).write_text(manifest.model_dump_json(indent=2) + "\n", encoding="utf-8")
    logger.info("Saved checkpoint (%d tensors) to %s", len(entries), directory)
    return directory


def read_manifest(directory: str | Path) -> CheckpointManifest:
    path = Path(directory) / MANIFEST
    if not path.is_file():
        msg = f"No checkpoint manifest at {path}"
        raise CheckpointError(msg)
    try:
        return CheckpointManifest.model_validate_json(path.read_text(encoding="utf-8"))
    except ValidationError as exc:
        msg = f"{path}: invalid manifest: {exc.error_count()} error(s)"
        raise CheckpointError(msg) from exc


def load_checkpoint(
    directory: str | Path,
    expected: dict[str, Any] | None = None,
) -> tuple[ModelParams, CheckpointManifest]:
    """Rebuild parameters from a checkpoint directory.

    Args:
        directory: Checkpoint directory.
        expected: Optional manifest fields that must match, e.g. the
            entity count of the dataset being evaluated.

    Raises:
        CheckpointError: On any missing file, corrupt tensor, or mismatch.
    """
    directory = Path(directory)
    manifest = read_manifest(directory)
    for key, value in (expected or {}).items():
        found = getattr(manifest, key)
        if found != value:
            msg = f"checkpoint {key} is {found!r}, expected {value!r}"
            raise CheckpointError(msg)
    tensors: dict[str, np.ndarray] = {}
    groups: dict[str, str] = {}
    for entry in manifest.tensors:
        path = directory / f"{entry.name}{SUFFIX}"
        if not path.is_file():
            msg = f"Missing tensor file {path}"
            raise CheckpointError(msg)
        array = decode_tensor(path.read_bytes(), entry.name)
        if list(array.shape) != entry.shape:
            msg = f"{entry.name}: shape {list(array.shape)} does not match manifest {entry.shape}"
            raise CheckpointError(msg)
        tensors[entry.name] = array
        groups[entry.name] = entry.group
    layout = ModelLayout(
        modalities=tuple(manifest.modalities),
        feature_dims=dict(manifest.feature_dims),
        d_e=manifest.d_e,
    )
    params = ModelParams(
        tensors,
        groups,
        layout,
        manifest.n_entities,
        manifest.n_relations,
        manifest.seed,
        relation_guidance=manifest.relation_guidance,
        missing_policy=manifest.missing_policy,
    )
    logger.info("Loaded checkpoint from %s (epoch %d)", directory, manifest.epoch)
    return params, manifest
