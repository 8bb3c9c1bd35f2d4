"""Training loop, vocabularies, prediction, and checkpoint IO."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, asdict
from typing import Sequence

import numpy as np

from . import model
from .binarize import EMPTY_LABEL, Internal, debinarize
from .codec import DistanceTuple, decode
from .scoring import score
from .trees import Tree

UNK = "<unk>"


@dataclass(frozen=True)
class Vocabulary:
    """Token and label inventories, fixed at training time.

    Words and tags get an unknown-token fallback at index 0; labels do not
    (they are outputs, drawn only from the training set).
    """

    words: tuple[str, ...]
    tags: tuple[str, ...]
    word_labels: tuple[str, ...]
    split_labels: tuple[str, ...]

    @classmethod
    def build(cls, corpus: Sequence[DistanceTuple]) -> "Vocabulary":
        if not corpus:
            raise ValueError("cannot build a vocabulary from an empty corpus")
        words = sorted({w for tup in corpus for w in tup.words})
        tags = sorted({t for tup in corpus for t in tup.tags})
        word_labels = {u for tup in corpus for u in tup.unary_labels}
        split_labels = {c for tup in corpus for c in tup.split_labels}
        word_labels.add(EMPTY_LABEL)
        split_labels.add(EMPTY_LABEL)
        return cls(
            words=(UNK, *words),
            tags=(UNK, *tags),
            word_labels=tuple(sorted(word_labels)),
            split_labels=tuple(sorted(split_labels)),
        )

    def __post_init__(self):
        object.__setattr__(
            self, "_word_index", {w: i for i, w in enumerate(self.words)}
        )
        object.__setattr__(self, "_tag_index", {t: i for i, t in enumerate(self.tags)})
        object.__setattr__(
            self, "_word_label_index", {u: i for i, u in enumerate(self.word_labels)}
        )
        object.__setattr__(
            self,
            "_split_label_index",
            {c: i for i, c in enumerate(self.split_labels)},
        )

    def word_id(self, word: str) -> int:
        return self._word_index.get(word, 0)

    def tag_id(self, tag: str) -> int:
        return self._tag_index.get(tag, 0)

    def word_label_id(self, label: str) -> int:
        try:
            return self._word_label_index[label]
        except KeyError:
            raise ValueError(f"word label {label!r} not in the training vocabulary")

    def split_label_id(self, label: str) -> int:
        try:
            return self._split_label_index[label]
        except KeyError:
            raise ValueError(f"split label {label!r} not in the training vocabulary")


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 20
    seed: int = 0
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    adam_eps: float = 1e-8
    weight_decay: float = 1e-6
    distance_loss: str = "rank"
    embed_dim: int = 16
    hidden_dim: int = 32
    conv_channels: int = 32
    ff_hidden: int = 32
    decode_engine: str = "stack"


class Adam:
    """Adam with decoupled weight decay, over a flat parameter dict."""

    def __init__(
        self,
        params: dict[str, np.ndarray],
        learning_rate: float = 1e-3,
        beta1: float = 0.9,
        beta2: float = 0.999,
        eps: float = 1e-8,
        weight_decay: float = 0.0,
    ):
        self.learning_rate = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.weight_decay = weight_decay
        self.step_count = 0
        self.first_moment = {k: np.zeros_like(v) for k, v in params.items()}
        self.second_moment = {k: np.zeros_like(v) for k, v in params.items()}

    def step(self, params: dict[str, np.ndarray], grads: dict[str, np.ndarray]) -> None:
        self.step_count += 1
        correction1 = 1.0 - self.beta1**self.step_count
        correction2 = 1.0 - self.beta2**self.step_count
        for name in params:
            g = grads[name]
            m = self.first_moment[name]
            v = self.second_moment[name]
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            m_hat = m / correction1
            v_hat = v / correction2
            params[name] -= self.learning_rate * (
                m_hat / (np.sqrt(v_hat) + self.eps) + self.weight_decay * params[name]
            )


@dataclass
class EpochMetrics:
    epoch: int
    distance_loss: float
    label_loss: float
    total_loss: float
    dev_labeled_f1: float
    dev_unlabeled_f1: float


@dataclass
class TrainResult:
    params: dict[str, np.ndarray]
    model_config: model.ModelConfig
    vocab: Vocabulary
    history: list[EpochMetrics] = field(default_factory=list)
    best_epoch: int = 0


def _encode_example(tup: DistanceTuple, vocab: Vocabulary):
    return (
        [vocab.word_id(w) for w in tup.words],
        [vocab.tag_id(t) for t in tup.tags],
        list(tup.distances),
        [vocab.word_label_id(u) for u in tup.unary_labels],
        [vocab.split_label_id(c) for c in tup.split_labels],
    )


def train(
    train_tuples: Sequence[DistanceTuple],
    dev_tuples: Sequence[DistanceTuple],
    config: TrainConfig = TrainConfig(),
    log=None,
) -> TrainResult:
    """Train on encoded sentences; keep the epoch with the best dev labeled
    F1. Deterministic given the corpus and ``config.seed``."""
    if not train_tuples:
        raise ValueError("empty training corpus")
    vocab = Vocabulary.build(train_tuples)
    model_config = model.ModelConfig(
        word_vocab=len(vocab.words),
        tag_vocab=len(vocab.tags),
        word_label_vocab=len(vocab.word_labels),
        split_label_vocab=len(vocab.split_labels),
        embed_dim=config.embed_dim,
        hidden_dim=config.hidden_dim,
        conv_channels=config.conv_channels,
        ff_hidden=config.ff_hidden,
    )
    rng = np.random.default_rng(config.seed)
    params = model.init_params(model_config, rng)
    optimizer = Adam(
        params,
        learning_rate=config.learning_rate,
        beta1=config.beta1,
        beta2=config.beta2,
        eps=config.adam_eps,
        weight_decay=config.weight_decay,
    )
    examples = [_encode_example(tup, vocab) for tup in train_tuples]
    gold_dev_trees = [
        debinarize(decode(tup, config.decode_engine)) for tup in dev_tuples
    ]

    result = TrainResult(params, model_config, vocab)
    best_f1 = -1.0
    best_params = {k: v.copy() for k, v in params.items()}
    for epoch in range(1, config.epochs + 1):
        order = rng.permutation(len(examples))
        sum_dist = 0.0
        sum_label = 0.0
        for index in order:
            word_ids, tag_ids, gold_d, gold_w, gold_s = examples[index]
            parts, grads = model.sentence_loss(
                params,
                model_config,
                word_ids,
                tag_ids,
                gold_d,
                gold_w,
                gold_s,
                config.distance_loss,
            )
            optimizer.step(params, grads)
            sum_dist += parts["distance"]
            sum_label += parts["label"]
        labeled_f1 = unlabeled_f1 = 0.0
        if dev_tuples:
            predictions = [
                predict_tree(
                    params, model_config, vocab, tup.words, tup.tags,
                    engine=config.decode_engine,
                )
                for tup in dev_tuples
            ]
            report = score(gold_dev_trees, predictions)
            labeled_f1 = report.labeled_f1
            unlabeled_f1 = report.unlabeled_f1
        metrics = EpochMetrics(
            epoch=epoch,
            distance_loss=sum_dist / len(examples),
            label_loss=sum_label / len(examples),
            total_loss=(sum_dist + sum_label) / len(examples),
            dev_labeled_f1=labeled_f1,
            dev_unlabeled_f1=unlabeled_f1,
        )
        result.history.append(metrics)
        if log is not None:
            log(
                f"epoch {epoch}: distance {metrics.distance_loss:.4f} "
                f"label {metrics.label_loss:.4f} "
                f"dev F1 {labeled_f1:.2f}/{unlabeled_f1:.2f} (labeled/unlabeled)"
            )
        if not dev_tuples or labeled_f1 > best_f1:
            best_f1 = labeled_f1
            best_params = {k: v.copy() for k, v in params.items()}
            result.best_epoch = epoch
    result.params = best_params
    return result


def predict_scores(
    params: dict[str, np.ndarray],
    model_config: model.ModelConfig,
    vocab: Vocabulary,
    words: Sequence[str],
    tags: Sequence[str],
) -> tuple[DistanceTuple, np.ndarray, np.ndarray]:
    """Forward pass on raw strings: the argmax-labeled tuple plus the two
    label probability matrices."""
    word_ids = [vocab.word_id(w) for w in words]
    tag_ids = [vocab.tag_id(t) for t in tags]
    result = model.forward(params, model_config, word_ids, tag_ids)
    unary = tuple(
        vocab.word_labels[i] for i in result.word_probs.argmax(axis=1)
    )
    split = tuple(
        vocab.split_labels[i] for i in result.split_probs.argmax(axis=1)
    )
    tup = DistanceTuple(
        words=tuple(words),
        tags=tuple(tags),
        unary_labels=unary,
        distances=tuple(float(d) for d in result.distances),
        split_labels=split,
    )
    return tup, result.word_probs, result.split_probs


def predict_tuple(
    params, model_config, vocab, words, tags
) -> DistanceTuple:
    tup, _, _ = predict_scores(params, model_config, vocab, words, tags)
    return tup


def predict_tree(
    params,
    model_config,
    vocab,
    words: Sequence[str],
    tags: Sequence[str],
    engine: str = "stack",
) -> Tree:
    """Parse: predict scores and labels, decode, and expand to an n-ary
    tree.

    The empty label marks non-constituent spans and is never legal on the
    root, but an argmax can still put it there; in that case the root keeps
    its best non-empty label instead, so prediction always yields a
    well-formed tree.
    """
    tup, _, split_probs = predict_scores(params, model_config, vocab, words, tags)
    tree = decode(tup, engine)
    if isinstance(tree, Internal) and tree.label == EMPTY_LABEL:
        root_split = int(np.argmax(np.asarray(tup.distances)))
        tree.label = _best_non_empty(split_probs[root_split], vocab.split_labels)
    return debinarize(tree)


def _best_non_empty(probs: np.ndarray, labels: tuple[str, ...]) -> str:
    order = np.argsort(-probs)
    for index in order:
        if labels[index] != EMPTY_LABEL:
            return labels[index]
    return "X"  # degenerate vocabulary: nothing but the empty label


CHECKPOINT_FORMAT = "distparse.checkpoint"


def save_checkpoint(
    path,
    result: TrainResult,
    metadata: dict | None = None,
) -> None:
    """Write a self-describing JSON checkpoint (dimensions, vocabularies,
    and every parameter array keyed by name)."""
    payload = {
        "format": CHECKPOINT_FORMAT,
        "version": 1,
        "model": asdict(result.model_config),
        "vocab": {
            "words": list(result.vocab.words),
            "tags": list(result.vocab.tags),
            "word_labels": list(result.vocab.word_labels),
            "split_labels": list(result.vocab.split_labels),
        },
        "params": {
            name: result.params[name].tolist() for name in sorted(result.params)
        },
        "metadata": metadata or {},
    }
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle)
        handle.write("\n")


def load_checkpoint(path) -> TrainResult:
    with open(path, encoding="utf-8") as handle:
        payload = json.load(handle)
    if payload.get("format") != CHECKPOINT_FORMAT:
        raise ValueError(f"{path} is not a recognized checkpoint file")
    model_config = model.ModelConfig(**payload["model"])
    vocab = Vocabulary(
        words=tuple(payload["vocab"]["words"]),
        tags=tuple(payload["vocab"]["tags"]),
        word_labels=tuple(payload["vocab"]["word_labels"]),
        split_labels=tuple(payload["vocab"]["split_labels"]),
    )
    params = {
        name: np.asarray(values, dtype=np.float64)
        for name, values in payload["params"].items()
    }
    expected = set(model.init_params(model_config, np.random.default_rng(0)))
    if set(params) != expected:
        raise ValueError("checkpoint parameter names do not match the model")
    return TrainResult(params=params, model_config=model_config, vocab=vocab)
