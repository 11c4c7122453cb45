"""Numerical core: factored tag embeddings, a self-attention encoder,
fencepost span representations, and a span label scorer.

Everything is float64 numpy with hand-written backpropagation, so gradients
can be verified against central finite differences.  The encoder uses
pre-layer-norm blocks (multi-head attention, then a two-layer ReLU
feedforward, each with a residual connection).  Contextual vector halves
are recombined across adjacent positions into fencepost vectors; a span
(i, j) is represented by the difference of fenceposts j and i.
"""

from __future__ import annotations

import json
import zlib
from dataclasses import asdict, dataclass

import numpy as np

from . import chart as _chart
from .transform import EMPTY_LABEL
from .treebank import ExtendedTag, Tree

UNK = "<UNK>"
LN_EPS = 1e-5

CHECKPOINT_MAGIC = b"DPXM"
CHECKPOINT_VERSION = 1


class ModelError(ValueError):
    pass


@dataclass(frozen=True)
class ModelConfig:
    """Encoder and scorer dimensions.

    ``num_heads * head_dim`` is the attention width; a linear projection
    maps it back to ``model_dim``, which must be even so that fencepost
    vectors can be assembled from forward and backward halves.
    """

    model_dim: int = 128
    num_layers: int = 2
    num_heads: int = 4
    head_dim: int = 32
    ff_dim: int = 256
    label_hidden_dim: int = 250
    max_len: int = 128
    seed: int = 10

    def __post_init__(self):
        if self.model_dim <= 0 or self.model_dim % 2:
            raise ModelError(f"model_dim must be positive and even, got {self.model_dim}")
        for name in ("num_heads", "head_dim", "ff_dim", "label_hidden_dim", "max_len"):
            if getattr(self, name) <= 0:
                raise ModelError(f"{name} must be positive")
        if self.num_layers < 0:
            raise ModelError("num_layers must be >= 0")


# Paper-scale preset; the default ModelConfig above is the desk-scale preset
# sized so that the full verification suite runs on a laptop CPU.
PAPER_MODEL = ModelConfig(model_dim=1024, num_layers=8, num_heads=8, head_dim=64,
                          ff_dim=2048, label_hidden_dim=250, max_len=512, seed=10)
DESK_MODEL = ModelConfig()


class ModelParams:
    """Weight tensors plus the vocabularies and label inventory they index.

    ``tensors`` maps fixed names to float64 arrays; gradient structures use
    the same keys.  Index 0 of both vocabularies is the unknown symbol, and
    label index 0 is the reserved empty label whose score is fixed at zero
    (the label output matrix has one column per non-empty label).
    """

    def __init__(self, config: ModelConfig, pos_names: list[str],
                 feature_names: list[str], labels: list[str],
                 tensors: dict[str, np.ndarray]):
        if labels[0] != EMPTY_LABEL:
            raise ModelError("label inventory must start with the empty label")
        if pos_names[0] != UNK or feature_names[0] != UNK:
            raise ModelError("vocabularies must start with the unknown symbol")
        self.config = config
        self.pos_names = list(pos_names)
        self.feature_names = list(feature_names)
        self.labels = list(labels)
        self.pos_index = {name: k for k, name in enumerate(pos_names)}
        self.feature_index = {name: k for k, name in enumerate(feature_names)}
        self.tensors = tensors

    def zero_grads(self) -> dict[str, np.ndarray]:
        return {name: np.zeros_like(value) for name, value in self.tensors.items()}

    def copy_tensors(self) -> dict[str, np.ndarray]:
        return {name: value.copy() for name, value in self.tensors.items()}


def tensor_names(config: ModelConfig) -> list[str]:
    names = ["pos_embedding", "feature_embedding", "position_encoding", "boundary"]
    for i in range(config.num_layers):
        prefix = f"layer_{i}/"
        names += [prefix + n for n in (
            "ln1_gain", "ln1_bias", "wq", "wk", "wv", "wo",
            "ln2_gain", "ln2_bias", "ff_w1", "ff_b1", "ff_w2", "ff_b2")]
    names += ["label_w1", "label_b1", "label_ln_gain", "label_ln_bias",
              "label_w2", "label_b2"]
    return names


def init_params(config: ModelConfig, pos_names: list[str],
                feature_names: list[str], labels: list[str]) -> ModelParams:
    """Seeded initialization: uniform(-0.1, 0.1) embeddings, fan-in scaled
    Gaussian weight matrices, unit gains and zero biases."""
    rng = np.random.default_rng(config.seed)
    d = config.model_dim
    att = config.num_heads * config.head_dim
    tensors: dict[str, np.ndarray] = {}

    def emb(shape):
        return rng.uniform(-0.1, 0.1, size=shape)

    def mat(fan_in, fan_out):
        return rng.normal(0.0, 1.0 / np.sqrt(fan_in), size=(fan_in, fan_out))

    tensors["pos_embedding"] = emb((len(pos_names), d))
    tensors["feature_embedding"] = emb((len(feature_names), d))
    tensors["position_encoding"] = emb((config.max_len, d))
    tensors["boundary"] = emb((2, d))
    for i in range(config.num_layers):
        p = f"layer_{i}/"
        tensors[p + "ln1_gain"] = np.ones(d)
        tensors[p + "ln1_bias"] = np.zeros(d)
        tensors[p + "wq"] = mat(d, att)
        tensors[p + "wk"] = mat(d, att)
        tensors[p + "wv"] = mat(d, att)
        tensors[p + "wo"] = mat(att, d)
        tensors[p + "ln2_gain"] = np.ones(d)
        tensors[p + "ln2_bias"] = np.zeros(d)
        tensors[p + "ff_w1"] = mat(d, config.ff_dim)
        tensors[p + "ff_b1"] = np.zeros(config.ff_dim)
        tensors[p + "ff_w2"] = mat(config.ff_dim, d)
        tensors[p + "ff_b2"] = np.zeros(d)
    tensors["label_w1"] = mat(d, config.label_hidden_dim)
    tensors["label_b1"] = np.zeros(config.label_hidden_dim)
    tensors["label_ln_gain"] = np.ones(config.label_hidden_dim)
    tensors["label_ln_bias"] = np.zeros(config.label_hidden_dim)
    tensors["label_w2"] = mat(config.label_hidden_dim, len(labels) - 1)
    tensors["label_b2"] = np.zeros(len(labels) - 1)
    return ModelParams(config, pos_names, feature_names, labels, tensors)


def _ln_forward(x, gain, bias):
    mean = x.mean(axis=-1, keepdims=True)
    centered = x - mean
    var = (centered * centered).mean(axis=-1, keepdims=True)
    inv = 1.0 / np.sqrt(var + LN_EPS)
    xhat = centered * inv
    return gain * xhat + bias, (xhat, inv)


def _ln_backward(dy, cache, gain):
    xhat, inv = cache
    axes = tuple(range(dy.ndim - 1))
    dgain = (dy * xhat).sum(axis=axes)
    dbias = dy.sum(axis=axes)
    dxhat = dy * gain
    dx = (dxhat - dxhat.mean(axis=-1, keepdims=True)
          - xhat * (dxhat * xhat).mean(axis=-1, keepdims=True)) * inv
    return dx, dgain, dbias


def _embed_forward(params: ModelParams, tags: list[ExtendedTag]):
    cfg = params.config
    n = len(tags)
    if n == 0:
        raise ModelError("cannot embed an empty sentence")
    if n > cfg.max_len:
        raise ModelError(f"sentence length {n} exceeds max_len {cfg.max_len}")
    t = params.tensors
    pos_idx = np.array([params.pos_index.get(tag.pos, 0) for tag in tags])
    feat_idx = [[params.feature_index.get(f, 0) for f in tag.features]
                for tag in tags]
    x = t["pos_embedding"][pos_idx] + t["position_encoding"][:n]
    for i, ids in enumerate(feat_idx):
        if ids:
            x[i] += t["feature_embedding"][ids].sum(axis=0)
    return x, (pos_idx, feat_idx, n)


def _embed_backward(params, grads, cache, dx):
    pos_idx, feat_idx, n = cache
    np.add.at(grads["pos_embedding"], pos_idx, dx)
    grads["position_encoding"][:n] += dx
    for i, ids in enumerate(feat_idx):
        if ids:
            np.add.at(grads["feature_embedding"], ids, dx[i])


def embed_sequence(params: ModelParams, tags: list[ExtendedTag]) -> np.ndarray:
    """Row i = pos embedding + sum of feature embeddings + position row."""
    x, _ = _embed_forward(params, tags)
    return x


def _encode_forward(params: ModelParams, x: np.ndarray):
    cfg = params.config
    t = params.tensors
    n, d = x.shape
    heads, dk = cfg.num_heads, cfg.head_dim
    scale = 1.0 / np.sqrt(dk)
    h = x
    layer_caches = []
    for i in range(cfg.num_layers):
        p = f"layer_{i}/"
        u, ln1c = _ln_forward(h, t[p + "ln1_gain"], t[p + "ln1_bias"])
        q = (u @ t[p + "wq"]).reshape(n, heads, dk).transpose(1, 0, 2)
        k = (u @ t[p + "wk"]).reshape(n, heads, dk).transpose(1, 0, 2)
        v = (u @ t[p + "wv"]).reshape(n, heads, dk).transpose(1, 0, 2)
        logits = q @ k.transpose(0, 2, 1) * scale
        logits -= logits.max(axis=-1, keepdims=True)
        weights = np.exp(logits)
        weights /= weights.sum(axis=-1, keepdims=True)
        heads_out = weights @ v                       # (H, n, dk)
        att_in = heads_out.transpose(1, 0, 2).reshape(n, heads * dk)
        a = h + att_in @ t[p + "wo"]
        v2, ln2c = _ln_forward(a, t[p + "ln2_gain"], t[p + "ln2_bias"])
        z = v2 @ t[p + "ff_w1"] + t[p + "ff_b1"]
        r = np.maximum(z, 0.0)
        h = a + r @ t[p + "ff_w2"] + t[p + "ff_b2"]
        if not np.all(np.isfinite(h)):
            raise ModelError(f"non-finite values after encoder layer {i}")
        layer_caches.append((u, ln1c, q, k, v, weights, att_in, v2, ln2c, z, r))
    half = d // 2
    ext = np.concatenate([t["boundary"][0:1], h, t["boundary"][1:2]], axis=0)
    fenceposts = np.concatenate([ext[:-1, :half], ext[1:, half:]], axis=1)
    return fenceposts, (layer_caches, n, d)


def _encode_backward(params, grads, cache, dfence):
    cfg = params.config
    t = params.tensors
    layer_caches, n, d = cache
    heads, dk = cfg.num_heads, cfg.head_dim
    scale = 1.0 / np.sqrt(dk)
    half = d // 2
    dext = np.zeros((n + 2, d))
    dext[:-1, :half] += dfence[:, :half]
    dext[1:, half:] += dfence[:, half:]
    grads["boundary"][0] += dext[0]
    grads["boundary"][1] += dext[-1]
    dh = dext[1:-1].copy()
    for i in reversed(range(cfg.num_layers)):
        p = f"layer_{i}/"
        u, ln1c, q, k, v, weights, att_in, v2, ln2c, z, r = layer_caches[i]
        # feedforward branch
        da = dh.copy()
        dr = dh @ t[p + "ff_w2"].T
        grads[p + "ff_w2"] += r.T @ dh
        grads[p + "ff_b2"] += dh.sum(axis=0)
        dz = dr * (z > 0.0)
        dv2 = dz @ t[p + "ff_w1"].T
        grads[p + "ff_w1"] += v2.T @ dz
        grads[p + "ff_b1"] += dz.sum(axis=0)
        da2, dg2, db2 = _ln_backward(dv2, ln2c, t[p + "ln2_gain"])
        grads[p + "ln2_gain"] += dg2
        grads[p + "ln2_bias"] += db2
        da += da2
        # attention branch
        datt = da @ t[p + "wo"].T
        grads[p + "wo"] += att_in.T @ da
        dheads = datt.reshape(n, heads, dk).transpose(1, 0, 2)
        dweights = dheads @ v.transpose(0, 2, 1)
        dv = weights.transpose(0, 2, 1) @ dheads
        dlogits = weights * (dweights - (dweights * weights).sum(axis=-1, keepdims=True))
        dlogits *= scale
        dq = dlogits @ k
        dk_ = dlogits.transpose(0, 2, 1) @ q
        dq_flat = dq.transpose(1, 0, 2).reshape(n, heads * dk)
        dk_flat = dk_.transpose(1, 0, 2).reshape(n, heads * dk)
        dv_flat = dv.transpose(1, 0, 2).reshape(n, heads * dk)
        du = dq_flat @ t[p + "wq"].T + dk_flat @ t[p + "wk"].T + dv_flat @ t[p + "wv"].T
        grads[p + "wq"] += u.T @ dq_flat
        grads[p + "wk"] += u.T @ dk_flat
        grads[p + "wv"] += u.T @ dv_flat
        dh_prev, dg1, db1 = _ln_backward(du, ln1c, t[p + "ln1_gain"])
        grads[p + "ln1_gain"] += dg1
        grads[p + "ln1_bias"] += db1
        dh = da + dh_prev
    return dh


def encode(params: ModelParams, x: np.ndarray) -> np.ndarray:
    """Run the encoder stack; returns n+1 fencepost vectors for n inputs."""
    fenceposts, _ = _encode_forward(params, x)
    return fenceposts


def _span_indices(n: int):
    return np.triu_indices(n + 1, k=1)


def _scores_forward(params: ModelParams, fenceposts: np.ndarray):
    t = params.tensors
    n = fenceposts.shape[0] - 1
    num_labels = len(params.labels)
    starts, ends = _span_indices(n)
    v = fenceposts[ends] - fenceposts[starts]
    z1 = v @ t["label_w1"] + t["label_b1"]
    hidden, lnc = _ln_forward(z1, t["label_ln_gain"], t["label_ln_bias"])
    r = np.maximum(hidden, 0.0)
    out = r @ t["label_w2"] + t["label_b2"]
    scores = np.zeros((n, n + 1, num_labels))
    scores[starts, ends, 1:] = out
    return scores, (starts, ends, v, hidden, lnc, r, n)


def _scores_backward(params, grads, cache, dscores):
    t = params.tensors
    starts, ends, v, hidden, lnc, r, n = cache
    dout = dscores[starts, ends, 1:]
    dr = dout @ t["label_w2"].T
    grads["label_w2"] += r.T @ dout
    grads["label_b2"] += dout.sum(axis=0)
    dhidden = dr * (hidden > 0.0)
    dz1, dgain, dbias = _ln_backward(dhidden, lnc, t["label_ln_gain"])
    grads["label_ln_gain"] += dgain
    grads["label_ln_bias"] += dbias
    dv = dz1 @ t["label_w1"].T
    grads["label_w1"] += v.T @ dz1
    grads["label_b1"] += dz1.sum(axis=0)
    dfence = np.zeros((n + 1, v.shape[1]))
    np.add.at(dfence, ends, dv)
    np.add.at(dfence, starts, -dv)
    return dfence


def span_scores(params: ModelParams, fenceposts: np.ndarray) -> np.ndarray:
    """Label scores for every span i < j; the empty-label column is zero."""
    scores, _ = _scores_forward(params, fenceposts)
    return scores


def forward_scores(params: ModelParams, tags: list[ExtendedTag]):
    """Full forward pass tags -> score tensor, keeping backprop caches."""
    x, embed_cache = _embed_forward(params, tags)
    fenceposts, encode_cache = _encode_forward(params, x)
    scores, scores_cache = _scores_forward(params, fenceposts)
    return scores, (embed_cache, encode_cache, scores_cache)


def backward_scores(params: ModelParams, caches, dscores) -> dict[str, np.ndarray]:
    """Backpropagate a gradient on the score tensor to all parameters."""
    embed_cache, encode_cache, scores_cache = caches
    grads = params.zero_grads()
    dfence = _scores_backward(params, grads, scores_cache, dscores)
    dx = _encode_backward(params, grads, encode_cache, dfence)
    _embed_backward(params, grads, embed_cache, dx)
    return grads


def sentence_scores(params: ModelParams, tags: list[ExtendedTag]) -> np.ndarray:
    scores, _ = forward_scores(params, tags)
    return scores


def loss_and_gradients(params: ModelParams, tags: list[ExtendedTag],
                       gold: Tree) -> tuple[float, dict[str, np.ndarray]]:
    """Structured hinge loss and exact subgradients for one sentence.

    The loss is the margin violation of the gold tree against the
    loss-augmented best decode, where the augmentation adds 1 for every
    span labeling disagreeing with gold.  A tree's score is the sum of its
    non-empty span scores, so shared spans cancel in the subgradient.
    """
    gold_spans, leaves = _chart.tree_spans(gold)
    if leaves != len(tags):
        raise ModelError(f"gold tree covers {leaves} leaves, got {len(tags)} tags")
    gold_idx = _chart.spans_to_indices(gold_spans, params.labels)
    scores, caches = forward_scores(params, tags)
    n, num_labels = len(tags), len(params.labels)
    augment = _chart.hamming_augment(n, num_labels, gold_idx)
    augmented_total, pred_spans = _chart.decode_spans(scores + augment)
    gold_total = sum(scores[i, j, l] for i, j, l in gold_idx if l != 0)
    loss = augmented_total - gold_total
    if loss <= 0.0:
        return 0.0, params.zero_grads()
    dscores = np.zeros_like(scores)
    for i, j, label in pred_spans:
        if label != 0:
            dscores[i, j, label] += 1.0
    for i, j, label in gold_idx:
        if label != 0:
            dscores[i, j, label] -= 1.0
    return float(loss), backward_scores(params, caches, dscores)


def build_label_inventory(trees: list[Tree]) -> list[str]:
    """Empty label first, then all phrase labels of the binarized trees."""
    labels: set[str] = set()

    def walk(node: Tree):
        if node.is_leaf or node.is_preterminal:
            return
        if node.label != EMPTY_LABEL:
            labels.add(node.label)
        for child in node.children:
            walk(child)

    for tree in trees:
        walk(tree)
    return [EMPTY_LABEL] + sorted(labels)


def build_vocabularies(sentences: list[list[ExtendedTag]]) -> tuple[list[str], list[str]]:
    """UNK-first POS and feature vocabularies from training tag sequences."""
    pos: set[str] = set()
    features: set[str] = set()
    for tags in sentences:
        for tag in tags:
            pos.add(tag.pos)
            features.update(tag.features)
    return [UNK] + sorted(pos), [UNK] + sorted(features)


def save_checkpoint(params: ModelParams, path) -> None:
    """Single-file checkpoint: magic, version, JSON header, raw tensors.

    The header records the config, label inventory, vocabularies, and a
    tensor directory with name, shape, byte offset, and CRC32; tensor data
    is little-endian float64 in directory order.
    """
    blobs = []
    directory = []
    offset = 0
    for name in tensor_names(params.config):
        data = np.ascontiguousarray(params.tensors[name], dtype="<f8").tobytes()
        directory.append({
            "name": name,
            "shape": list(params.tensors[name].shape),
            "dtype": "<f8",
            "offset": offset,
            "nbytes": len(data),
            "crc32": zlib.crc32(data),
        })
        blobs.append(data)
        offset += len(data)
    header = {
        "format_version": CHECKPOINT_VERSION,
        "config": asdict(params.config),
        "labels": params.labels,
        "pos_vocab": params.pos_names,
        "feature_vocab": params.feature_names,
        "tensors": directory,
    }
    header_bytes = json.dumps(header, sort_keys=True, ensure_ascii=True).encode("ascii")
    with open(path, "wb") as fh:
        fh.write(CHECKPOINT_MAGIC)
        fh.write(CHECKPOINT_VERSION.to_bytes(4, "little"))
        fh.write(len(header_bytes).to_bytes(8, "little"))
        fh.write(header_bytes)
        for blob in blobs:
            fh.write(blob)


def load_checkpoint(path) -> ModelParams:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != CHECKPOINT_MAGIC:
            raise ModelError(f"not a model checkpoint: bad magic {magic!r}")
        version = int.from_bytes(fh.read(4), "little")
        if version != CHECKPOINT_VERSION:
            raise ModelError(f"unsupported checkpoint version {version}")
        header_len = int.from_bytes(fh.read(8), "little")
        header = json.loads(fh.read(header_len).decode("ascii"))
        blob = fh.read()
    config = ModelConfig(**header["config"])
    tensors: dict[str, np.ndarray] = {}
    for entry in header["tensors"]:
        start = entry["offset"]
        data = blob[start:start + entry["nbytes"]]
        if zlib.crc32(data) != entry["crc32"]:
            raise ModelError(f"checksum mismatch for tensor {entry['name']!r}")
        tensors[entry["name"]] = np.frombuffer(data, dtype="<f8").reshape(
            entry["shape"]).copy()
    return ModelParams(config, header["pos_vocab"], header["feature_vocab"],
                       header["labels"], tensors)
