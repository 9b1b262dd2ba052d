"""Configuration loader with YAML parsing and Pydantic validation.

Config files are sectioned by module (``run``, ``kg_data``, ``redaf``,
``comat``, ``train_eval``, ``ablation``); the sections are flattened into
a single ``RunConfig``.
"""

from __future__ import annotations

import copy
import hashlib
import json
import logging
from pathlib import Path
from typing import Any

import yaml
from pydantic import ValidationError

from src.contracts.config import RunConfig
from src.contracts.errors import ConfigError

logger = logging.getLogger(__name__)

SECTIONS: dict[str, tuple[str, ...]] = {
    "run": ("seed", "out_dir", "save_every", "eval_every", "threads"),
    "kg_data": ("data_dir", "modalities", "missing_policy"),
    "redaf": ("d_e", "gamma", "beta", "num_negatives", "init_scale"),
    "comat": (
        "noise_dim",
        "lambda1",
        "lambda2",
        "lr_g",
        "n_critic",
        "gp_sign",
        "generator_hidden",
    ),
    "train_eval": ("batch_size", "epochs", "lr_d", "eval_split"),
    "ablation": (
        "no_comat",
        "no_relation_guidance",
        "no_gp",
        "vanilla_gan",
        "mlp_discriminator",
    ),
}
FLAG_KEYS = frozenset((*SECTIONS["ablation"], "gp_sign"))
DEFAULT_SCHEMA = (
    Path(__file__).resolve().parent.parent.parent / "configs" / "schemas" / "run_config.schema.json"
)


def load_config(
    config_path: str | Path | None = None,
    *,
    base_path: str | Path | None = None,
    overrides: dict[str, Any] | None = None,
) -> RunConfig:
    """Load and validate a sectioned YAML run configuration.

    Args:
        config_path: Path to the YAML config file; None uses defaults.
        base_path: Optional file merged underneath ``config_path``.
        overrides: Sectioned values applied last (e.g. from CLI flags).

    Returns:
        Validated RunConfig instance.

    Raises:
        ConfigError: On a missing file, YAML syntax error, unknown
            section or key, or a failed field validation.
    """
    raw = merge_configs(base_path, config_path)
    if overrides:
        raw = _deep_merge(raw, overrides)
    return config_from_sections(raw)


def read_yaml(path: str | Path) -> dict[str, Any]:
    path = Path(path)
    if not path.exists():
        msg = f"Config file not found: {path}"
        raise ConfigError(msg)
    try:
        with path.open(encoding="utf-8") as f:
            raw = yaml.safe_load(f) or {}
    except yaml.YAMLError as exc:
        msg = f"{path}: invalid YAML: {exc}"
        raise ConfigError(msg) from exc
    if not isinstance(raw, dict):
        msg = f"{path}: top level must be a mapping of sections"
        raise ConfigError(msg)
    return raw


def config_from_sections(raw: dict[str, Any]) -> RunConfig:
    """Validate sectioned values into a RunConfig."""
    try:
        return RunConfig(**_flatten_config(raw))
    except ValidationError as exc:
        problems = "; ".join(
            f"{'.'.join(str(p) for p in err['loc']) or 'config'}: {err['msg']}"
            for err in exc.errors()
        )
        msg = f"Invalid config: {problems}"
        raise ConfigError(msg) from exc


def to_sections(config: RunConfig) -> dict[str, dict[str, Any]]:
    """Inverse of flattening: the sectioned form of a RunConfig."""
    flat = config.model_dump(exclude={"flags"})
    flat.update(config.flags.model_dump())
    return {section: {key: flat[key] for key in keys} for section, keys in SECTIONS.items()}


def snapshot_config(config: RunConfig, path: str | Path) -> Path:
    """Write the resolved config as sectioned YAML."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as f:
        yaml.safe_dump(to_sections(config), f, sort_keys=False, default_flow_style=False)
    return path


def config_hash(config: RunConfig) -> str:
    """Short stable digest of the resolved config, used as the run id."""
    payload = json.dumps(to_sections(config), sort_keys=True)
    return hashlib.sha256(payload.encode()).hexdigest()[:12]


def parse_set_overrides(assignments: list[str]) -> dict[str, Any]:
    """Turn ``section.key=value`` strings into a sectioned dict.

    Values are parsed as YAML scalars, so ``1.0e-3``, ``true`` and
    ``[S, T]`` keep their types.

    Raises:
        ConfigError: On a malformed assignment.
    """
    result: dict[str, Any] = {}
    for item in assignments:
        target, sep, value = item.partition("=")
        section, dot, key = target.partition(".")
        if not sep or not dot or not section or not key:
            msg = f"--set expects section.key=value, got '{item}'"
            raise ConfigError(msg)
        try:
            parsed = yaml.safe_load(value) if value else None
        except yaml.YAMLError as exc:
            msg = f"--set {target}: cannot parse value '{value}'"
            raise ConfigError(msg) from exc
        result.setdefault(section, {})[key] = parsed
    return result


def merge_configs(*paths: str | Path | None) -> dict[str, Any]:
    """Deep-merge sectioned YAML files, later files on top.

    Later values replace earlier ones at the leaf level; sections merge
    key by key. ``None`` entries are skipped.

    Returns:
        Merged sections; empty when no path is given.
    """
    merged: dict[str, Any] = {}
    for path in paths:
        if path is not None:
            merged = _deep_merge(merged, read_yaml(path))
    return merged


def validate_config_schema(
    config: dict[str, Any],
    schema_path: str | Path | None = None,
) -> list[str]:
    """Validate a config dict against the JSON Schema.

    Args:
        config: Parsed YAML config dict.
        schema_path: Path to JSON Schema file. Defaults to
            configs/schemas/run_config.schema.json.

    Returns:
        List of validation error messages (empty if valid).
    """
    try:
        import jsonschema
    except ImportError:
        logger.warning("jsonschema not installed, skipping schema validation")
        return []

    schema_path = Path(schema_path or DEFAULT_SCHEMA)
    if not schema_path.exists():
        logger.warning("Schema file not found: %s", schema_path)
        return []

    schema = json.loads(schema_path.read_text(encoding="utf-8"))
    validator = jsonschema.Draft7Validator(schema)
    return [err.message for err in validator.iter_errors(config)]


def _flatten_config(raw: dict) -> dict:
    """Flatten sectioned YAML into RunConfig-compatible kwargs.

    Args:
        raw: Raw parsed YAML dict.

    Returns:
        Flat dict matching RunConfig fields, with ablation switches and
        ``gp_sign`` gathered under ``flags``.

    Raises:
        ConfigError: On an unknown section or key.
    """
    flat: dict[str, Any] = {}
    flags: dict[str, Any] = {}
    for section, values in raw.items():
        if section not in SECTIONS:
            msg = f"Unknown config section '{section}'. Available: {', '.join(SECTIONS)}"
            raise ConfigError(msg)
        if values is None:
            continue
        if not isinstance(values, dict):
            msg = f"Config section '{section}' must be a mapping"
            raise ConfigError(msg)
        for key, value in values.items():
            if key not in SECTIONS[section]:
                msg = f"Unknown key '{section}.{key}'. Allowed: {', '.join(SECTIONS[section])}"
                raise ConfigError(msg)
            (flags if key in FLAG_KEYS else flat)[key] = value
    if flags:
        flat["flags"] = flags
    return flat


def _deep_merge(base: dict, override: dict) -> dict:
    """Recursively merge override into base.

    Args:
        base: Base config dict (not mutated).
        override: Override values to apply.

    Returns:
        New merged dict.
    """
    result = copy.deepcopy(base)
    for key, value in override.items():
        if key in result and isinstance(result[key], dict) and isinstance(value, dict):
            result[key] = _deep_merge(result[key], value)
        else:
            result[key] = copy.deepcopy(value)
    return result
