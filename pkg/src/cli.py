"""NativE CLI entry point.

Provides the `native` command with subcommands for training,
evaluation, modality perturbation, reporting, and synthetic data.

Usage:
    native gen-synth --out-dir data/synth --seed 7
    native train --config configs/experiments/desk_synth.yaml --seed 7
    native eval --model-dir outputs/desk_synth --groups
    native perturb --data-dir data/synth --eta 0.3 --level entity --out-dir data/synth_eta30
    native report --model-dir outputs/desk_synth

Exit codes: 0 ok, 2 config error, 3 data or checkpoint error, 4 numeric
failure. Errors print one JSON line {"error", "code", "reason"} to stderr.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path
from typing import Any

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from pydantic import ValidationError  # noqa: E402

from src.contracts.errors import CheckpointError, ConfigError, NativeError  # noqa: E402

ABLATION_FLAGS = (
    "no_comat",
    "no_relation_guidance",
    "no_gp",
    "vanilla_gan",
    "mlp_discriminator",
)


def _add_train_parser(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("train", help="Train a model")
    parser.add_argument("--config", type=str, required=True, help="Path to YAML config file")
    parser.add_argument("--base", type=str, default=None, help="Config merged underneath --config")
    parser.add_argument("--seed", type=int, default=None, help="Override run.seed")
    parser.add_argument("--epochs", type=int, default=None, help="Override train_eval.epochs")
    parser.add_argument("--data-dir", type=str, default=None, help="Override kg_data.data_dir")
    parser.add_argument("--out-dir", type=str, default=None, help="Override run.out_dir")
    parser.add_argument(
        "--modalities", type=str, default=None, help="Comma-separated subset, e.g. S,T"
    )
    parser.add_argument("--threads", type=int, default=None, help="Evaluation threads")
    for flag in ABLATION_FLAGS:
        parser.add_argument(f"--{flag.replace('_', '-')}", action="store_true", default=None)
    parser.add_argument(
        "--set",
        dest="assignments",
        action="append",
        default=[],
        metavar="SECTION.KEY=VALUE",
        help="Override any config value (repeatable)",
    )
    parser.add_argument(
        "--skip-eval", action="store_true", help="Do not evaluate after training"
    )
    parser.set_defaults(func=_run_train)


def _add_eval_parser(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("eval", help="Evaluate a trained model")
    parser.add_argument("--model-dir", type=str, required=True, help="Run or checkpoint dir")
    parser.add_argument("--data-dir", type=str, default=None, help="Defaults to the training data")
    parser.add_argument("--split", choices=["valid", "test"], default="test")
    parser.add_argument("--groups", action="store_true", help="Add Group1/2/3 sub-reports")
    parser.add_argument("--threads", type=int, default=1, help="Worker threads")
    parser.add_argument("--out-dir", type=str, default=None, help="Defaults to --model-dir")
    parser.set_defaults(func=_run_eval)


def _add_perturb_parser(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("perturb", help="Drop modality information")
    parser.add_argument("--data-dir", type=str, required=True, help="Source dataset")
    parser.add_argument("--eta", type=float, required=True, help="Fraction in [0, 1]")
    parser.add_argument("--level", choices=["entity", "modality"], default="entity")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out-dir", type=str, required=True, help="Perturbed copy")
    parser.set_defaults(func=_run_perturb)


def _add_report_parser(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("report", help="Dump temperatures and modality weights")
    parser.add_argument("--model-dir", type=str, required=True, help="Run or checkpoint dir")
    parser.add_argument("--data-dir", type=str, default=None, help="Defaults to the training data")
    parser.add_argument("--out-dir", type=str, default=None, help="Defaults to --model-dir")
    parser.add_argument("--sample", type=int, default=1000, help="Training triples to sample")
    parser.add_argument("--seed", type=int, default=0)
    parser.set_defaults(func=_run_report)


def _add_gen_synth_parser(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("gen-synth", help="Generate a synthetic dataset")
    parser.add_argument("--out-dir", type=str, required=True)
    parser.add_argument("--entities", type=int, default=100)
    parser.add_argument("--relations", type=int, default=10)
    parser.add_argument("--modalities", type=str, default="I,T")
    parser.add_argument("--dims", type=str, default="16,16")
    parser.add_argument("--clusters", type=int, default=None)
    parser.add_argument("--density", type=float, default=0.3)
    parser.add_argument("--noise", type=float, default=0.05)
    parser.add_argument("--seed", type=int, default=0)
    parser.set_defaults(func=_run_gen_synth)


def _train_overrides(args: argparse.Namespace) -> dict[str, Any]:
    from src.utils.config import parse_set_overrides

    overrides = parse_set_overrides(args.assignments)

    def put(section: str, key: str, value: Any) -> None:
        if value is not None:
            overrides.setdefault(section, {})[key] = value

    put("run", "seed", args.seed)
    put("run", "out_dir", args.out_dir)
    put("run", "threads", args.threads)
    put("train_eval", "epochs", args.epochs)
    put("kg_data", "data_dir", args.data_dir)
    if args.modalities is not None:
        put("kg_data", "modalities", _split_list(args.modalities))
    for flag in ABLATION_FLAGS:
        put("ablation", flag, getattr(args, flag))
    return overrides


def _run_train(args: argparse.Namespace) -> None:
    from src.core.data import load_dataset
    from src.core.training import evaluate
    from src.core.training.trainer import NativeTrainer
    from src.telemetry.callbacks import create_telemetry_callback
    from src.utils.config import config_hash, load_config, snapshot_config
    from src.utils.logging import setup_command_logging

    logger = setup_command_logging("train")

    config = load_config(args.config, base_path=args.base, overrides=_train_overrides(args))
    out_dir = Path(config.out_dir)
    run_id = f"run_{config_hash(config)}"
    logger.info("Config loaded: run_id=%s data=%s out=%s", run_id, config.data_dir, out_dir)

    kg, store = load_dataset(config.data_dir)
    snapshot_config(config, out_dir / "config.yaml")

    trainer = NativeTrainer(config, kg, store)
    result = trainer.train(callbacks=[create_telemetry_callback(str(out_dir), run_id)])

    if not args.skip_eval:
        report = evaluate(
            result.params,
            kg,
            trainer.store,
            config.eval_split,
            threads=config.threads,
            loss_curve=result.loss_curve,
        )
        _write_metrics(report, out_dir)
        logger.info("Final %s MRR: %.4f", config.eval_split, report.mrr)
    logger.info("Run saved to: %s", out_dir)


def _run_eval(args: argparse.Namespace) -> None:
    from src.core.training import evaluate
    from src.utils.logging import setup_command_logging

    logger = setup_command_logging("eval")

    params, kg, store = _load_model_and_data(args.model_dir, args.data_dir)
    report = evaluate(params, kg, store, args.split, groups=args.groups, threads=args.threads)
    out_dir = Path(args.out_dir or args.model_dir)
    _write_metrics(report, out_dir)
    logger.info("MRR=%.4f Hits@1=%.4f Hits@10=%.4f", report.mrr, report.hits[1], report.hits[10])
    for name, group in report.groups.items():
        logger.info("  %s: %d queries, MRR=%.4f", name, group.n_queries, group.mrr)


def _run_perturb(args: argparse.Namespace) -> None:
    from src.contracts.data import ImbalanceSpec
    from src.core.data import drop_manifest, load_dataset, perturb, write_perturbed_dataset
    from src.utils.logging import setup_command_logging

    logger = setup_command_logging("perturb")

    spec = ImbalanceSpec(eta=args.eta, level=args.level, seed=args.seed)
    kg, store = load_dataset(args.data_dir)
    after = perturb(store, kg, spec)
    manifest = drop_manifest(kg, store, after, spec)
    target = write_perturbed_dataset(args.data_dir, args.out_dir, kg, after, manifest)
    logger.info(
        "Dropped %d entries (%d whole entities) into: %s",
        len(manifest.entries),
        len(manifest.entities),
        target,
    )


def _run_report(args: argparse.Namespace) -> None:
    import numpy as np

    from src.core.model.redaf import fuse
    from src.utils.logging import setup_command_logging
    from src.utils.seeding import stream

    logger = setup_command_logging("report")

    out_dir = Path(args.out_dir or args.model_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    checkpoint = _resolve_checkpoint(args.model_dir)
    params, kg, store = _load_model_and_data(checkpoint, args.data_dir)

    zeta = params.tensors["relation_temperature"]
    with (out_dir / "temperatures.csv").open("w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["relation", "zeta", "sigmoid_zeta"])
        for name, value in zip(kg.relations, zeta.tolist(), strict=True):
            writer.writerow([name, repr(value), repr(float(1.0 / (1.0 + np.exp(-value))))])

    train = kg.train
    size = min(args.sample, len(train))
    sample = train[np.sort(stream(args.seed, "report").choice(len(train), size=size, replace=False))]
    view = params.on(None)
    with (out_dir / "modality_weights.csv").open("w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["relation", *params.layout.modalities])
        for relation in range(kg.n_relations):
            heads = sample[sample[:, 1] == relation, 0]
            if len(heads) == 0:
                continue
            weights = fuse(view, store, heads, np.full(len(heads), relation)).weights.data
            writer.writerow([kg.relations[relation], *(repr(float(w)) for w in weights.mean(axis=0))])
    logger.info("Wrote temperatures.csv and modality_weights.csv to: %s", out_dir)


def _run_gen_synth(args: argparse.Namespace) -> None:
    from src.core.data import gen_synth
    from src.utils.logging import setup_command_logging

    logger = setup_command_logging("gen-synth")

    try:
        dims = [int(d) for d in _split_list(args.dims)]
    except ValueError as exc:
        msg = f"--dims must be comma-separated integers, got '{args.dims}'"
        raise ConfigError(msg) from exc
    path = gen_synth(
        args.out_dir,
        n_entities=args.entities,
        n_relations=args.relations,
        modalities=_split_list(args.modalities),
        dims=dims,
        seed=args.seed,
        n_clusters=args.clusters,
        density=args.density,
        noise=args.noise,
    )
    logger.info("Synthetic dataset written to: %s", path)


def _split_list(value: str) -> list[str]:
    return [part.strip() for part in value.split(",") if part.strip()]


def _resolve_checkpoint(model_dir: str | Path) -> Path:
    """Accept either a checkpoint dir or a run dir that contains one."""
    from src.core.model.checkpoint import MANIFEST
    from src.core.training.trainer import CHECKPOINT_DIR

    path = Path(model_dir)
    for candidate in (path, path / CHECKPOINT_DIR):
        if (candidate / MANIFEST).is_file():
            return candidate
    msg = f"No checkpoint found in {path}"
    raise CheckpointError(msg)


def _load_model_and_data(model_dir: str | Path, data_dir: str | None):
    from src.core.data import load_dataset
    from src.core.model.checkpoint import load_checkpoint, read_manifest

    checkpoint = _resolve_checkpoint(model_dir)
    manifest = read_manifest(checkpoint)
    data_dir = data_dir or manifest.data_dir
    if data_dir is None:
        msg = "Checkpoint does not record its dataset; pass --data-dir"
        raise ConfigError(msg)
    kg, store = load_dataset(data_dir)
    params, _ = load_checkpoint(
        checkpoint,
        expected={"n_entities": kg.n_entities, "n_relations": kg.n_relations},
    )
    missing = [m for m in params.layout.feature_modalities if m not in store.names]
    if missing:
        msg = f"Dataset {data_dir} lacks modalities used by the checkpoint: {missing}"
        raise CheckpointError(msg)
    for name in params.layout.feature_modalities:
        if store.dim(name) != params.layout.feature_dims[name]:
            msg = f"modality '{name}' has dim {store.dim(name)}, checkpoint expects {params.layout.feature_dims[name]}"
            raise CheckpointError(msg)
    return params, kg, store.select(params.layout.feature_modalities)


def _write_metrics(report: Any, out_dir: Path) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / "metrics.json"
    path.write_text(report.to_json() + "\n", encoding="utf-8")
    return path


def _fail(kind: str, code: int, reason: str) -> int:
    print(json.dumps({"error": kind, "code": code, "reason": reason}), file=sys.stderr)
    return code


def main(argv: list[str] | None = None) -> int:
    """CLI entry point; returns the process exit code."""
    parser = argparse.ArgumentParser(
        prog="native",
        description="NativE: adversarial multi-modal knowledge graph completion",
    )
    subparsers = parser.add_subparsers(dest="command")

    _add_train_parser(subparsers)
    _add_eval_parser(subparsers)
    _add_perturb_parser(subparsers)
    _add_report_parser(subparsers)
    _add_gen_synth_parser(subparsers)

    args = parser.parse_args(argv)

    if not args.command:
        parser.print_help()
        return 0

    try:
        args.func(args)
    except NativeError as exc:
        return _fail(exc.kind, exc.exit_code, str(exc))
    except ValidationError as exc:
        reason = "; ".join(f"{'.'.join(str(p) for p in e['loc'])}: {e['msg']}" for e in exc.errors())
        return _fail(ConfigError.kind, ConfigError.exit_code, reason)
    return 0


if __name__ == "__main__":
    sys.exit(main())
