"""Command-line interface.

Subcommands: encode, decode, roundtrip, train, predict, score, bench.
Every command is deterministic given its flags and seed. Run metadata
(command, version, flags, seed) is embedded in outputs that have room for
it (checkpoints, metrics logs, CSV comments) and written to a ``.run.json``
sidecar next to line-oriented outputs, which stay format-clean.

Exit codes: 0 on success, 1 on failure with a one-line
``error: <kind>: <message>`` on stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace

from . import __version__, bench, codec, scoring, train as training
from .binarize import binarize, debinarize
from .trees import (
    TreebankError,
    parse_bracketed,
    preprocess,
    serialize_bracketed,
)


class CliError(Exception):
    """Failure with a user-facing one-line message."""

    def __init__(self, kind: str, message: str):
        super().__init__(f"{kind}: {message}")
        self.kind = kind


def _read_text(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as handle:
            return handle.read()
    except OSError as exc:
        raise CliError("io", f"cannot read {path}: {exc.strerror}")


def _write_text(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(text)
    except OSError as exc:
        raise CliError("io", f"cannot write {path}: {exc.strerror}")


def _run_metadata(args: argparse.Namespace, command: str) -> dict:
    skip = {"func", "out", "command"}
    flags = {
        key: value
        for key, value in sorted(vars(args).items())
        if key not in skip and value is not None and not callable(value)
    }
    return {"command": command, "version": __version__, "flags": flags}


def _write_sidecar(out: str | None, metadata: dict) -> None:
    if out is None:
        return
    _write_text(out + ".run.json", json.dumps(metadata, indent=2) + "\n")


def _load_trees(path: str):
    try:
        return parse_bracketed(_read_text(path))
    except TreebankError as exc:
        raise CliError("parse", f"{path}: {exc}")


def _pipeline_tuples(path: str) -> tuple[list[codec.DistanceTuple], int]:
    """treebank file -> (encoded tuples, count of trees emptied by
    preprocessing)."""
    tuples = []
    skipped = 0
    for tree in _load_trees(path):
        cleaned = preprocess(tree)
        if cleaned is None:
            skipped += 1
            continue
        tuples.append(codec.encode(binarize(cleaned)))
    return tuples, skipped


def cmd_encode(args) -> int:
    tuples, skipped = _pipeline_tuples(args.input)
    lines = "".join(codec.to_json_line(tup) + "\n" for tup in tuples)
    _write_text(args.out, lines)
    metadata = _run_metadata(args, "encode")
    metadata["trees"] = len(tuples)
    metadata["skipped_empty"] = skipped
    _write_sidecar(args.out, metadata)
    if skipped:
        print(f"warning: {skipped} trees empty after preprocessing", file=sys.stderr)
    return 0


def _read_jsonl(path: str) -> list[codec.DistanceTuple]:
    tuples = []
    for number, line in enumerate(_read_text(path).splitlines(), start=1):
        if not line.strip():
            continue
        try:
            tuples.append(codec.from_json_line(line))
        except (ValueError, TypeError) as exc:
            raise CliError("decode", f"{path}: line {number}: {exc}")
    return tuples


def cmd_decode(args) -> int:
    tuples = _read_jsonl(args.input)
    lines = []
    for tup in tuples:
        tree = debinarize(codec.decode(tup, args.engine))
        lines.append(serialize_bracketed(tree) + "\n")
    _write_text(args.out, "".join(lines))
    _write_sidecar(args.out, _run_metadata(args, "decode"))
    return 0


def cmd_roundtrip(args) -> int:
    trees = _load_trees(args.input)
    total = 0
    mismatches = []
    for index, tree in enumerate(trees):
        cleaned = preprocess(tree)
        if cleaned is None:
            continue
        total += 1
        reference = serialize_bracketed(cleaned)
        tup = codec.encode(binarize(cleaned))
        restored = serialize_bracketed(debinarize(codec.decode(tup, args.engine)))
        if restored != reference:
            mismatches.append((index, reference, restored))
    print(f"roundtrip: {total} trees, {len(mismatches)} mismatches")
    for index, reference, restored in mismatches:
        print(f"sentence {index}:\n  gold: {reference}\n  got:  {restored}")
    return 1 if mismatches else 0


def _parse_config_file(path: str) -> dict:
    """Flat ``key = value`` lines; '#' starts a comment."""
    values = {}
    for number, raw in enumerate(_read_text(path).splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise CliError("config", f"{path}: line {number}: expected key = value")
        key, _, value = line.partition("=")
        values[key.strip()] = value.strip()
    return values


_CONFIG_FIELDS = {
    "epochs": int,
    "seed": int,
    "learning_rate": float,
    "beta1": float,
    "beta2": float,
    "adam_eps": float,
    "weight_decay": float,
    "distance_loss": str,
    "embed_dim": int,
    "hidden_dim": int,
    "conv_channels": int,
    "ff_hidden": int,
    "decode_engine": str,
}


def _train_config(args) -> training.TrainConfig:
    config = training.TrainConfig()
    if args.config:
        raw = _parse_config_file(args.config)
        unknown = set(raw) - set(_CONFIG_FIELDS)
        if unknown:
            raise CliError("config", f"unknown keys: {', '.join(sorted(unknown))}")
        try:
            config = replace(
                config,
                **{key: _CONFIG_FIELDS[key](value) for key, value in raw.items()},
            )
        except ValueError as exc:
            raise CliError("config", str(exc))
    overrides = {}
    if args.epochs is not None:
        overrides["epochs"] = args.epochs
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.loss is not None:
        overrides["distance_loss"] = args.loss
    if args.engine is not None:
        overrides["decode_engine"] = args.engine
    return replace(config, **overrides)


def cmd_train(args) -> int:
    config = _train_config(args)
    train_tuples, skipped_train = _pipeline_tuples(args.train)
    dev_tuples, skipped_dev = _pipeline_tuples(args.dev) if args.dev else ([], 0)
    if not train_tuples:
        raise CliError("train", f"no usable trees in {args.train}")

    def log(message: str) -> None:
        print(message, file=sys.stderr)

    result = training.train(train_tuples, dev_tuples, config, log=log)
    metadata = _run_metadata(args, "train")
    metadata["train_config"] = {
        key: getattr(config, key) for key in _CONFIG_FIELDS
    }
    metadata["skipped_empty"] = {"train": skipped_train, "dev": skipped_dev}
    metadata["best_epoch"] = result.best_epoch
    training.save_checkpoint(args.out, result, metadata=metadata)
    if args.metrics:
        metrics_lines = [json.dumps({"run": metadata})]
        for epoch in result.history:
            metrics_lines.append(
                json.dumps(
                    {
                        "epoch": epoch.epoch,
                        "distance_loss": epoch.distance_loss,
                        "label_loss": epoch.label_loss,
                        "total_loss": epoch.total_loss,
                        "dev_labeled_f1": epoch.dev_labeled_f1,
                        "dev_unlabeled_f1": epoch.dev_unlabeled_f1,
                    }
                )
            )
        _write_text(args.metrics, "".join(line + "\n" for line in metrics_lines))
    best = result.history[result.best_epoch - 1] if result.history else None
    if best is not None:
        print(
            f"best epoch {result.best_epoch}: dev labeled F1 "
            f"{best.dev_labeled_f1:.2f}, unlabeled {best.dev_unlabeled_f1:.2f}"
        )
    return 0


def cmd_predict(args) -> int:
    try:
        result = training.load_checkpoint(args.model)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise CliError("checkpoint", f"{args.model}: {exc}")
    lines = []
    for tree in _load_trees(args.input):
        cleaned = preprocess(tree)
        if cleaned is None:
            continue
        tup = codec.encode(binarize(cleaned))
        predicted = training.predict_tree(
            result.params,
            result.model_config,
            result.vocab,
            tup.words,
            tup.tags,
            engine=args.engine,
        )
        lines.append(serialize_bracketed(predicted) + "\n")
    _write_text(args.out, "".join(lines))
    _write_sidecar(args.out, _run_metadata(args, "predict"))
    return 0


def cmd_score(args) -> int:
    gold_trees = [
        t for t in (preprocess(x) for x in _load_trees(args.gold)) if t is not None
    ]
    pred_trees = [
        t for t in (preprocess(x) for x in _load_trees(args.pred)) if t is not None
    ]
    try:
        report = scoring.score(gold_trees, pred_trees)
        gold_tuples = [codec.encode(binarize(t)) for t in gold_trees]
        pred_tuples = [codec.encode(binarize(t)) for t in pred_trees]
        word_acc = scoring.word_label_accuracy(gold_tuples, pred_tuples)
        split_acc = scoring.split_label_accuracy(gold_tuples, pred_tuples)
    except (scoring.EvaluationError, ValueError) as exc:
        raise CliError("score", str(exc))
    if args.json:
        payload = report.to_dict()
        payload["word_label_accuracy"] = word_acc
        payload["split_label_accuracy"] = split_acc
        _write_text(args.out, json.dumps(payload, indent=2) + "\n")
    else:
        text = scoring.format_report(report, word_label_acc=word_acc)
        text += f"\nsplit label accuracy: {split_acc:.2f}%\n"
        _write_text(args.out, text)
    return 0


def cmd_bench(args) -> int:
    try:
        sizes = [int(s) for s in args.sizes.split(",") if s]
        engines = [e.strip() for e in args.engines.split(",") if e.strip()]
    except ValueError as exc:
        raise CliError("bench", str(exc))
    for engine in engines:
        if engine not in codec.ENGINES:
            raise CliError("bench", f"unknown engine {engine!r}")
    seed = args.seed if args.seed is not None else 0
    try:
        rows = bench.run(
            sizes,
            engines,
            args.shape,
            repetitions=args.reps,
            seed=seed,
            interleave=True,
        )
    except (ValueError, AssertionError) as exc:
        raise CliError("bench", str(exc))
    metadata = _run_metadata(args, "bench")
    metadata["seed"] = seed
    _write_text(args.out, bench.to_csv(rows, metadata=metadata))
    for engine in engines:
        ratios = bench.doubling_ratios(rows, engine)
        if ratios:
            pretty = ", ".join(f"{size}->{ratio:.2f}" for size, ratio in ratios)
            print(f"{engine}: doubling ratios {pretty}", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="distparse",
        description="Constituency parsing via per-split scores.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("encode", help="treebank file -> score tuples (JSONL)")
    p.add_argument("input")
    p.add_argument("--out", help="output path (default: stdout)")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", help="score tuples (JSONL) -> treebank file")
    p.add_argument("input")
    p.add_argument("--engine", choices=codec.ENGINES, default="stack")
    p.add_argument("--out")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser(
        "roundtrip", help="verify encode->decode reproduces a treebank file"
    )
    p.add_argument("input")
    p.add_argument("--engine", choices=codec.ENGINES, default="stack")
    p.set_defaults(func=cmd_roundtrip)

    p = sub.add_parser("train", help="train a score model on treebank files")
    p.add_argument("--train", required=True, help="training treebank file")
    p.add_argument("--dev", help="development treebank file")
    p.add_argument("--out", required=True, help="checkpoint path")
    p.add_argument("--metrics", help="per-epoch metrics JSONL path")
    p.add_argument("--config", help="flat key=value config file")
    p.add_argument("--epochs", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--loss", choices=("rank", "mse"))
    p.add_argument("--engine", choices=codec.ENGINES)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="parse sentences from a treebank file")
    p.add_argument("input", help="treebank file supplying words and tags")
    p.add_argument("--model", required=True, help="checkpoint path")
    p.add_argument("--engine", choices=codec.ENGINES, default="stack")
    p.add_argument("--out")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("score", help="bracket scores for predicted trees")
    p.add_argument("gold")
    p.add_argument("pred")
    p.add_argument("--json", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("bench", help="time the decoder engines")
    p.add_argument("--sizes", default="1000,2000,4000")
    p.add_argument("--engines", default=",".join(codec.ENGINES))
    p.add_argument("--shape", choices=bench.SHAPES, default="left-chain")
    p.add_argument("--reps", type=int, default=20)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (TreebankError, ValueError) as exc:
        print(f"error: invalid-input: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
