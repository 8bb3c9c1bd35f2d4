"""The score-prediction network and its hand-written backward pass.

Pipeline, for an n-word sentence:

1. word + tag embeddings, concatenated per position
2. word-level bidirectional LSTM -> one state per word
3. a 2-layer feed-forward head with softmax over per-word unary labels
4. a width-2 convolution over adjacent word states -> one vector per
   split point (n - 1 of them), tanh activation
5. split-level bidirectional LSTM over the split vectors
6. a 2-layer head with a single linear output unit -> the split scores
7. a 2-layer head with softmax over split labels

Everything is float64 numpy; parameters live in a flat name->array dict so
the optimizer and the gradient checks can treat them uniformly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import losses


@dataclass(frozen=True)
class ModelConfig:
    """Dimensions of the network. Defaults are desk-scale."""

    word_vocab: int
    tag_vocab: int
    word_label_vocab: int
    split_label_vocab: int
    embed_dim: int = 16
    hidden_dim: int = 32  # per LSTM direction
    conv_channels: int = 32
    ff_hidden: int = 32

    def validate(self) -> None:
        for name in (
            "word_vocab",
            "tag_vocab",
            "word_label_vocab",
            "split_label_vocab",
            "embed_dim",
            "hidden_dim",
            "conv_channels",
            "ff_hidden",
        ):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")


def _glorot(rng: np.random.Generator, fan_in: int, fan_out: int) -> np.ndarray:
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=(fan_in, fan_out))


def init_params(config: ModelConfig, rng: np.random.Generator) -> dict[str, np.ndarray]:
    """Fresh parameter dict. LSTM forget-gate biases start at 1."""
    config.validate()
    e, h = config.embed_dim, config.hidden_dim
    m, f = config.conv_channels, config.ff_hidden
    params: dict[str, np.ndarray] = {
        "embed_word": rng.uniform(-0.1, 0.1, size=(config.word_vocab, e)),
        "embed_tag": rng.uniform(-0.1, 0.1, size=(config.tag_vocab, e)),
    }
    for prefix, in_dim in (("lstm_word", 2 * e), ("lstm_split", m)):
        for direction in ("fwd", "bwd"):
            bias = np.zeros(4 * h)
            bias[h : 2 * h] = 1.0
            params[f"{prefix}_{direction}_Wx"] = _glorot(rng, in_dim, 4 * h)
            params[f"{prefix}_{direction}_Wh"] = _glorot(rng, h, 4 * h)
            params[f"{prefix}_{direction}_b"] = bias
    params["conv_W"] = _glorot(rng, 4 * h, m)
    params["conv_b"] = np.zeros(m)
    for head, out_dim in (
        ("word_head", config.word_label_vocab),
        ("dist_head", 1),
        ("split_head", config.split_label_vocab),
    ):
        params[f"{head}_W1"] = _glorot(rng, 2 * h, f)
        params[f"{head}_b1"] = np.zeros(f)
        params[f"{head}_W2"] = _glorot(rng, f, out_dim)
        params[f"{head}_b2"] = np.zeros(out_dim)
    return params


def zero_grads(params: dict[str, np.ndarray]) -> dict[str, np.ndarray]:
    return {name: np.zeros_like(value) for name, value in params.items()}


def _sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def _lstm_forward(x, Wx, Wh, b):
    steps = x.shape[0]
    hidden = Wh.shape[0]
    gates_in = x @ Wx + b
    h = np.zeros(hidden)
    c = np.zeros(hidden)
    cache = {
        "x": x,
        "h_prev": np.zeros((steps, hidden)),
        "c_prev": np.zeros((steps, hidden)),
        "i": np.zeros((steps, hidden)),
        "f": np.zeros((steps, hidden)),
        "g": np.zeros((steps, hidden)),
        "o": np.zeros((steps, hidden)),
        "tanh_c": np.zeros((steps, hidden)),
    }
    out = np.zeros((steps, hidden))
    for t in range(steps):
        cache["h_prev"][t] = h
        cache["c_prev"][t] = c
        z = gates_in[t] + h @ Wh
        i = _sigmoid(z[:hidden])
        f = _sigmoid(z[hidden : 2 * hidden])
        g = np.tanh(z[2 * hidden : 3 * hidden])
        o = _sigmoid(z[3 * hidden :])
        c = f * c + i * g
        tanh_c = np.tanh(c)
        h = o * tanh_c
        cache["i"][t], cache["f"][t], cache["g"][t], cache["o"][t] = i, f, g, o
        cache["tanh_c"][t] = tanh_c
        out[t] = h
    return out, cache


def _lstm_backward(d_out, cache, Wx, Wh):
    x = cache["x"]
    steps, hidden = d_out.shape
    dz_all = np.zeros((steps, 4 * hidden))
    dh_next = np.zeros(hidden)
    dc_next = np.zeros(hidden)
    for t in reversed(range(steps)):
        i, f, g, o = cache["i"][t], cache["f"][t], cache["g"][t], cache["o"][t]
        tanh_c = cache["tanh_c"][t]
        dh = d_out[t] + dh_next
        dc = dh * o * (1.0 - tanh_c * tanh_c) + dc_next
        dz = dz_all[t]
        dz[:hidden] = dc * g * i * (1.0 - i)
        dz[hidden : 2 * hidden] = dc * cache["c_prev"][t] * f * (1.0 - f)
        dz[2 * hidden : 3 * hidden] = dc * i * (1.0 - g * g)
        dz[3 * hidden :] = dh * tanh_c * o * (1.0 - o)
        dh_next = Wh @ dz
        dc_next = dc * f
    grads = {
        "Wx": x.T @ dz_all,
        "Wh": cache["h_prev"].T @ dz_all,
        "b": dz_all.sum(axis=0),
    }
    dx = dz_all @ Wx.T
    return dx, grads


def _bilstm_forward(x, params, prefix):
    fwd, cache_f = _lstm_forward(
        x, params[f"{prefix}_fwd_Wx"], params[f"{prefix}_fwd_Wh"], params[f"{prefix}_fwd_b"]
    )
    rev, cache_b = _lstm_forward(
        x[::-1], params[f"{prefix}_bwd_Wx"], params[f"{prefix}_bwd_Wh"], params[f"{prefix}_bwd_b"]
    )
    out = np.concatenate([fwd, rev[::-1]], axis=1)
    return out, (cache_f, cache_b)


def _bilstm_backward(d_out, caches, params, prefix, grads):
    cache_f, cache_b = caches
    hidden = params[f"{prefix}_fwd_Wh"].shape[0]
    dx_f, g_f = _lstm_backward(
        d_out[:, :hidden], cache_f, params[f"{prefix}_fwd_Wx"], params[f"{prefix}_fwd_Wh"]
    )
    dx_b, g_b = _lstm_backward(
        d_out[:, hidden:][::-1], cache_b, params[f"{prefix}_bwd_Wx"], params[f"{prefix}_bwd_Wh"]
    )
    for key, value in g_f.items():
        grads[f"{prefix}_fwd_{key}"] += value
    for key, value in g_b.items():
        grads[f"{prefix}_bwd_{key}"] += value
    return dx_f + dx_b[::-1]


def _ff_forward(x, params, prefix):
    pre = x @ params[f"{prefix}_W1"] + params[f"{prefix}_b1"]
    hidden = np.tanh(pre)
    out = hidden @ params[f"{prefix}_W2"] + params[f"{prefix}_b2"]
    return out, (x, hidden)


def _ff_backward(d_out, cache, params, prefix, grads):
    x, hidden = cache
    grads[f"{prefix}_W2"] += hidden.T @ d_out
    grads[f"{prefix}_b2"] += d_out.sum(axis=0)
    d_hidden = d_out @ params[f"{prefix}_W2"].T
    d_pre = d_hidden * (1.0 - hidden * hidden)
    grads[f"{prefix}_W1"] += x.T @ d_pre
    grads[f"{prefix}_b1"] += d_pre.sum(axis=0)
    return d_pre @ params[f"{prefix}_W1"].T


def _softmax(logits: np.ndarray) -> np.ndarray:
    if logits.shape[0] == 0:
        return logits.copy()
    shifted = logits - logits.max(axis=1, keepdims=True)
    ex = np.exp(shifted)
    return ex / ex.sum(axis=1, keepdims=True)


def _softmax_backward(d_probs: np.ndarray, probs: np.ndarray) -> np.ndarray:
    inner = (d_probs * probs).sum(axis=1, keepdims=True)
    return probs * (d_probs - inner)


@dataclass
class ForwardResult:
    distances: np.ndarray  # (n-1,)
    word_probs: np.ndarray  # (n, word labels)
    split_probs: np.ndarray  # (n-1, split labels)
    cache: dict = field(repr=False, default_factory=dict)


def forward(
    params: dict[str, np.ndarray],
    config: ModelConfig,
    word_ids: Sequence[int],
    tag_ids: Sequence[int],
) -> ForwardResult:
    """Run the full pipeline on one sentence of ``n >= 1`` words."""
    n = len(word_ids)
    if n == 0:
        raise ValueError("cannot run the network on an empty sentence")
    if len(tag_ids) != n:
        raise ValueError(f"{n} words but {len(tag_ids)} tags")
    word_ids = np.asarray(word_ids, dtype=np.int64)
    tag_ids = np.asarray(tag_ids, dtype=np.int64)
    if (
        word_ids.min() < 0
        or tag_ids.min() < 0
        or word_ids.max() >= config.word_vocab
        or tag_ids.max() >= config.tag_vocab
    ):
        raise ValueError("token id outside the configured vocabulary")

    x = np.concatenate(
        [params["embed_word"][word_ids], params["embed_tag"][tag_ids]], axis=1
    )
    h_word, word_caches = _bilstm_forward(x, params, "lstm_word")
    word_logits, word_head_cache = _ff_forward(h_word, params, "word_head")
    word_probs = _softmax(word_logits)

    # one vector per split point from each adjacent pair of word states
    pairs = np.concatenate([h_word[:-1], h_word[1:]], axis=1)
    conv_pre = pairs @ params["conv_W"] + params["conv_b"]
    g_split = np.tanh(conv_pre)
    h_split, split_caches = _bilstm_forward(g_split, params, "lstm_split")
    dist_out, dist_head_cache = _ff_forward(h_split, params, "dist_head")
    distances = dist_out[:, 0]
    split_logits, split_head_cache = _ff_forward(h_split, params, "split_head")
    split_probs = _softmax(split_logits)

    cache = {
        "word_ids": word_ids,
        "tag_ids": tag_ids,
        "word_caches": word_caches,
        "word_head_cache": word_head_cache,
        "word_probs": word_probs,
        "pairs": pairs,
        "g_split": g_split,
        "split_caches": split_caches,
        "dist_head_cache": dist_head_cache,
        "split_head_cache": split_head_cache,
        "split_probs": split_probs,
    }
    return ForwardResult(distances, word_probs, split_probs, cache)


def backward(
    params: dict[str, np.ndarray],
    config: ModelConfig,
    result: ForwardResult,
    d_distances: np.ndarray,
    d_word_probs: np.ndarray,
    d_split_probs: np.ndarray,
) -> dict[str, np.ndarray]:
    """Gradients of a scalar loss given its gradients at the three outputs.

    Probability gradients are chained through the softmax here.
    """
    cache = result.cache
    grads = zero_grads(params)
    hidden2 = 2 * config.hidden_dim

    d_split_logits = _softmax_backward(
        np.asarray(d_split_probs, dtype=np.float64), cache["split_probs"]
    )
    d_h_split = _ff_backward(
        d_split_logits, cache["split_head_cache"], params, "split_head", grads
    )
    d_dist_out = np.asarray(d_distances, dtype=np.float64).reshape(-1, 1)
    d_h_split += _ff_backward(
        d_dist_out, cache["dist_head_cache"], params, "dist_head", grads
    )
    d_g_split = _bilstm_backward(
        d_h_split, cache["split_caches"], params, "lstm_split", grads
    )
    g_split = cache["g_split"]
    d_conv_pre = d_g_split * (1.0 - g_split * g_split)
    pairs = cache["pairs"]
    grads["conv_W"] += pairs.T @ d_conv_pre
    grads["conv_b"] += d_conv_pre.sum(axis=0)
    d_pairs = d_conv_pre @ params["conv_W"].T

    n = len(cache["word_ids"])
    d_h_word = np.zeros((n, hidden2))
    d_h_word[:-1] += d_pairs[:, :hidden2]
    d_h_word[1:] += d_pairs[:, hidden2:]
    d_word_logits = _softmax_backward(
        np.asarray(d_word_probs, dtype=np.float64), cache["word_probs"]
    )
    d_h_word += _ff_backward(
        d_word_logits, cache["word_head_cache"], params, "word_head", grads
    )
    d_x = _bilstm_backward(d_h_word, cache["word_caches"], params, "lstm_word", grads)

    e = config.embed_dim
    np.add.at(grads["embed_word"], cache["word_ids"], d_x[:, :e])
    np.add.at(grads["embed_tag"], cache["tag_ids"], d_x[:, e:])
    return grads


LOSS_KINDS = ("rank", "mse")


def sentence_loss(
    params: dict[str, np.ndarray],
    config: ModelConfig,
    word_ids: Sequence[int],
    tag_ids: Sequence[int],
    gold_distances: Sequence[float],
    gold_word_labels: Sequence[int],
    gold_split_labels: Sequence[int],
    distance_loss: str = "rank",
) -> tuple[dict[str, float], dict[str, np.ndarray]]:
    """Total loss (distance + label terms) and its parameter gradients for
    one sentence."""
    if distance_loss not in LOSS_KINDS:
        raise ValueError(f"unknown distance loss {distance_loss!r}")
    result = forward(params, config, word_ids, tag_ids)
    loss_fn = losses.rank_loss if distance_loss == "rank" else losses.mse_loss
    dist_value, d_distances = loss_fn(gold_distances, result.distances)
    word_value, d_word_probs = losses.label_loss(gold_word_labels, result.word_probs)
    split_value, d_split_probs = losses.label_loss(
        gold_split_labels, result.split_probs
    )
    grads = backward(
        params, config, result, d_distances, d_word_probs, d_split_probs
    )
    parts = {
        "distance": dist_value,
        "label": word_value + split_value,
        "total": dist_value + word_value + split_value,
    }
    return parts, grads
