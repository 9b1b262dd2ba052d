"""Tests for config loader."""

from __future__ import annotations

from pathlib import Path

import pytest
import yaml

from src.contracts.errors import ConfigError
from src.utils.config import (
    config_from_sections,
    config_hash,
    load_config,
    merge_configs,
    parse_set_overrides,
    snapshot_config,
    to_sections,
    validate_config_schema,
)

CONFIGS = Path(__file__).resolve().parents[2] / "configs"


class TestLoadConfig:
    def test_load_base_config(self) -> None:
        config = load_config(CONFIGS / "base.yaml")
        assert config.d_e == 250
        assert config.num_negatives == 64
        assert config.missing_policy == "random"
        assert config.flags.gp_sign == "paper"

    def test_defaults_without_file(self) -> None:
        assert load_config() == load_config(CONFIGS / "base.yaml")

    def test_experiment_on_base(self) -> None:
        config = load_config(
            CONFIGS / "experiments" / "desk_synth.yaml", base_path=CONFIGS / "base.yaml"
        )
        assert config.d_e == 64
        assert config.gamma == 6.0
        assert config.beta == 2.0

    def test_ablation_overlay(self) -> None:
        config = load_config(CONFIGS / "experiments" / "no_comat.yaml", base_path=CONFIGS / "base.yaml")
        assert config.flags.no_comat
        assert config.effective_lambda1 == 0.0

    def test_overrides_apply_last(self) -> None:
        config = load_config(CONFIGS / "base.yaml", overrides={"redaf": {"d_e": 8}})
        assert config.d_e == 8

    def test_missing_file_raises(self) -> None:
        with pytest.raises(ConfigError, match="not found"):
            load_config("nonexistent.yaml")

    def test_invalid_yaml(self, tmp_path) -> None:
        path = tmp_path / "bad.yaml"
        path.write_text("redaf: [unclosed", encoding="utf-8")
        with pytest.raises(ConfigError, match="invalid YAML"):
            load_config(path)

    def test_top_level_must_be_mapping(self, tmp_path) -> None:
        path = tmp_path / "list.yaml"
        path.write_text("- 1\n- 2\n", encoding="utf-8")
        with pytest.raises(ConfigError, match="mapping"):
            load_config(path)


class TestSections:
    def test_unknown_section(self) -> None:
        with pytest.raises(ConfigError, match="Unknown config section 'model'"):
            config_from_sections({"model": {"d_e": 4}})

    def test_unknown_key(self) -> None:
        with pytest.raises(ConfigError, match="Unknown key 'redaf.lr'"):
            config_from_sections({"redaf": {"lr": 0.1}})

    def test_field_validation_is_a_config_error(self) -> None:
        with pytest.raises(ConfigError, match="d_e"):
            config_from_sections({"redaf": {"d_e": 5}})

    def test_flags_are_gathered(self) -> None:
        config = config_from_sections({"ablation": {"no_gp": True}, "comat": {"gp_sign": "standard"}})
        assert config.flags.no_gp
        assert config.flags.gp_sign == "standard"

    @pytest.mark.parametrize(("written", "loaded"), [("paper", "paper"), ("negated", "paper"), ("standard", "standard")])
    def test_gp_sign_from_yaml(self, tmp_path, written: str, loaded: str) -> None:
        path = tmp_path / "run.yaml"
        path.write_text(yaml.safe_dump({"comat": {"gp_sign": written}}))
        assert load_config(path).flags.gp_sign == loaded

    def test_empty_section_is_ignored(self) -> None:
        assert config_from_sections({"run": None}).seed == 42

    def test_sections_round_trip(self) -> None:
        config = config_from_sections({"redaf": {"d_e": 6}, "ablation": {"vanilla_gan": True}})
        assert config_from_sections(to_sections(config)) == config


class TestSnapshot:
    def test_snapshot_reloads_identically(self, toy_config, tmp_path) -> None:
        path = snapshot_config(toy_config, tmp_path / "out" / "config.yaml")
        assert load_config(path) == toy_config

    def test_hash_is_stable_and_sensitive(self, toy_config) -> None:
        assert config_hash(toy_config) == config_hash(toy_config.model_copy())
        assert len(config_hash(toy_config)) == 12
        assert config_hash(toy_config) != config_hash(toy_config.model_copy(update={"seed": 4}))


class TestSetOverrides:
    def test_values_keep_yaml_types(self) -> None:
        overrides = parse_set_overrides(
            ["comat.lambda1=0.5", "ablation.no_gp=true", "kg_data.modalities=[S, T]", "redaf.d_e=8"]
        )
        assert overrides == {
            "comat": {"lambda1": 0.5},
            "ablation": {"no_gp": True},
            "kg_data": {"modalities": ["S", "T"]},
            "redaf": {"d_e": 8},
        }

    @pytest.mark.parametrize("item", ["d_e=8", "redaf.d_e", ".d_e=8", "redaf.=8"])
    def test_malformed(self, item: str) -> None:
        with pytest.raises(ConfigError, match="section.key=value"):
            parse_set_overrides([item])


class TestMergeAndSchema:
    def test_merge_configs(self) -> None:
        merged = merge_configs(CONFIGS / "base.yaml", CONFIGS / "experiments" / "desk_synth.yaml")
        assert merged["redaf"]["d_e"] == 64
        assert merged["redaf"]["beta"] == 2.0

    def test_merge_configs_later_files_win(self, tmp_path) -> None:
        third = tmp_path / "third.yaml"
        third.write_text(yaml.safe_dump({"redaf": {"d_e": 8}}))
        merged = merge_configs(CONFIGS / "base.yaml", None, CONFIGS / "experiments" / "desk_synth.yaml", third)
        assert merged["redaf"]["d_e"] == 8
        assert merged["redaf"]["num_negatives"] == 16
        assert merge_configs() == {}

    def test_load_config_uses_merged_sections(self) -> None:
        base, desk = CONFIGS / "base.yaml", CONFIGS / "experiments" / "desk_synth.yaml"
        assert load_config(desk, base_path=base) == config_from_sections(merge_configs(base, desk))

    @pytest.mark.parametrize(
        "name",
        ["base.yaml", "experiments/desk_synth.yaml", "experiments/no_comat.yaml",
         "experiments/vanilla_gan.yaml", "experiments/mlp_discriminator.yaml"],
    )
    def test_shipped_configs_match_schema(self, name: str) -> None:
        pytest.importorskip("jsonschema")
        raw = yaml.safe_load((CONFIGS / name).read_text(encoding="utf-8"))
        assert validate_config_schema(raw) == []

    def test_schema_rejects_unknown_key(self) -> None:
        pytest.importorskip("jsonschema")
        assert validate_config_schema({"redaf": {"lr": 0.1}})
