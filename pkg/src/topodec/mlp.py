"""Feedforward classifier written directly in numpy.

Hidden layer: affine -> batch norm (batch statistics in training, running
averages at inference) -> scale/shift -> ReLU.  The head is an affine map to
four logits followed by softmax over the logical classes I, X, Y, Z.
"""
from __future__ import annotations

import io
import json
import logging
import math
import struct
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from . import rng as rngmod
from .codes import CodeLattice
from .exgraph import ExcitationGraph, batch_removal
from .noise import NoiseModel, effective_rate, rate_from_effective, sample_batch
from .pauli import batch_logical_class, batch_syndrome

log = logging.getLogger(__name__)

N_CLASSES = 4
LOSS_CLIP = 1e-12
MIN_BATCH_WARN = 256


class Network:
    def __init__(self, input_dim: int, hidden: list[int], n_classes: int = N_CLASSES,
                 bn_momentum: float = 0.9, bn_eps: float = 1e-5, dtype=np.float64):
        if input_dim < 1 or any(h < 1 for h in hidden) or n_classes < 2:
            raise ValueError("layer sizes must be positive")
        self.input_dim = input_dim
        self.hidden = list(hidden)
        self.n_classes = n_classes
        self.bn_momentum = bn_momentum
        self.bn_eps = bn_eps
        self.dtype = np.dtype(dtype)
        sizes = [input_dim] + self.hidden
        self.W = [np.zeros((a, b), self.dtype) for a, b in zip(sizes, sizes[1:])]
        self.b = [np.zeros(h, self.dtype) for h in self.hidden]
        self.gamma = [np.ones(h, self.dtype) for h in self.hidden]
        self.beta = [np.zeros(h, self.dtype) for h in self.hidden]
        self.running_mean = [np.zeros(h, self.dtype) for h in self.hidden]
        self.running_var = [np.ones(h, self.dtype) for h in self.hidden]
        self.W_out = np.zeros((sizes[-1], n_classes), self.dtype)
        self.b_out = np.zeros(n_classes, self.dtype)
        self.fingerprint = ""

    def params(self) -> list[np.ndarray]:
        out = []
        for l in range(len(self.hidden)):
            out += [self.W[l], self.b[l], self.gamma[l], self.beta[l]]
        return out + [self.W_out, self.b_out]

    def param_names(self) -> list[str]:
        names = []
        for l in range(len(self.hidden)):
            names += [f"W{l}", f"b{l}", f"gamma{l}", f"beta{l}"]
        return names + ["W_out", "b_out"]

    def running_stats(self) -> list[np.ndarray]:
        return [a for l in range(len(self.hidden)) for a in (self.running_mean[l], self.running_var[l])]

    def copy(self) -> "Network":
        other = Network(self.input_dim, self.hidden, self.n_classes, self.bn_momentum, self.bn_eps, self.dtype)
        for dst, src in zip(other.params() + other.running_stats(), self.params() + self.running_stats()):
            dst[...] = src
        other.fingerprint = self.fingerprint
        return other


def he_init(net: Network, rng: np.random.Generator) -> Network:
    """Gaussian weights with variance 2 / fan_in; zero biases; unit BN scale."""
    for W in net.W + [net.W_out]:
        W[...] = rng.normal(0.0, math.sqrt(2.0 / W.shape[0]), size=W.shape)
    for l in range(len(net.hidden)):
        net.b[l][...] = 0
        net.gamma[l][...] = 1
        net.beta[l][...] = 0
        net.running_mean[l][...] = 0
        net.running_var[l][...] = 1
    net.b_out[...] = 0
    return net


def softmax(logits: np.ndarray) -> np.ndarray:
    z = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


@dataclass
class ForwardCache:
    inputs: list[np.ndarray] = field(default_factory=list)  # input to each affine layer
    xhat: list[np.ndarray] = field(default_factory=list)
    inv_std: list[np.ndarray] = field(default_factory=list)
    pre_relu: list[np.ndarray] = field(default_factory=list)
    head_input: np.ndarray | None = None
    probs: np.ndarray | None = None


def forward(net: Network, x: np.ndarray, mode: str = "infer", update_stats: bool = True):
    """Class probabilities; in train mode also returns the backprop cache."""
    if mode not in ("train", "infer"):
        raise ValueError(f"mode must be 'train' or 'infer', got {mode!r}")
    h = np.asarray(x, dtype=net.dtype)
    if h.ndim != 2 or h.shape[1] != net.input_dim:
        raise ValueError(f"expected inputs of shape (B, {net.input_dim}), got {h.shape}")
    train = mode == "train"
    if train and h.shape[0] < 2:
        raise ValueError("train mode needs a batch of at least 2 for batch statistics")
    cache = ForwardCache() if train else None
    m = net.bn_momentum
    for l in range(len(net.hidden)):
        z = h @ net.W[l] + net.b[l]
        if train:
            mu = z.mean(axis=0)
            var = z.var(axis=0)
            if update_stats:
                net.running_mean[l] *= m
                net.running_mean[l] += (1 - m) * mu
                net.running_var[l] *= m
                net.running_var[l] += (1 - m) * var
        else:
            mu, var = net.running_mean[l], net.running_var[l]
        inv = 1.0 / np.sqrt(var + net.bn_eps)
        xhat = (z - mu) * inv
        y = net.gamma[l] * xhat + net.beta[l]
        if train:
            cache.inputs.append(h)
            cache.xhat.append(xhat)
            cache.inv_std.append(inv)
            cache.pre_relu.append(y)
        h = np.maximum(y, 0)
    probs = softmax(h @ net.W_out + net.b_out)
    if train:
        cache.head_input = h
        cache.probs = probs
        return probs, cache
    return probs


def _onehot(labels: np.ndarray, k: int, dtype) -> np.ndarray:
    labels = np.asarray(labels)
    out = np.zeros((labels.shape[0], k), dtype=dtype)
    out[np.arange(labels.shape[0]), labels] = 1
    return out


def loss(probs: np.ndarray, labels: np.ndarray) -> float:
    """Negated per-class cross entropy, averaged over the batch.

    ``-mean_i sum_c [y log f + (1 - y) log(1 - f)]`` with f clipped to
    ``[1e-12, 1 - 1e-12]``.
    """
    probs = np.asarray(probs)
    labels = np.asarray(labels)
    if labels.ndim == 1:
        if labels.shape[0] != probs.shape[0]:
            raise ValueError("labels and predictions disagree on batch size")
        y = _onehot(labels, probs.shape[1], np.float64)
    else:
        if labels.shape != probs.shape:
            raise ValueError(f"shape mismatch: {labels.shape} vs {probs.shape}")
        y = labels.astype(np.float64)
    f = np.clip(probs.astype(np.float64), LOSS_CLIP, 1 - LOSS_CLIP)
    return float(-np.mean(np.sum(y * np.log(f) + (1 - y) * np.log(1 - f), axis=1)))


def backprop(net: Network, cache: ForwardCache | None, labels: np.ndarray) -> list[np.ndarray]:
    """Gradients of :func:`loss` in the order of ``net.params()``."""
    if cache is None or cache.probs is None:
        raise ValueError("backprop needs the cache from a train-mode forward pass")
    f = cache.probs
    B = f.shape[0]
    y = _onehot(labels, net.n_classes, f.dtype)
    inside = (f > LOSS_CLIP) & (f < 1 - LOSS_CLIP)
    # in float32 the upper clip rounds to 1, so mask with where (inf * 0 is nan)
    fc = np.where(inside, f, 0.5)
    dfp = np.where(inside, -(y / fc - (1 - y) / (1 - fc)), 0) / B
    dlogits = f * (dfp - np.sum(dfp * f, axis=1, keepdims=True))

    grads_rev = [dlogits.sum(axis=0), cache.head_input.T @ dlogits]  # b_out, W_out
    dh = dlogits @ net.W_out.T
    for l in reversed(range(len(net.hidden))):
        dy = dh * (cache.pre_relu[l] > 0)
        xhat = cache.xhat[l]
        dbeta = dy.sum(axis=0)
        dgamma = np.sum(dy * xhat, axis=0)
        dxhat = dy * net.gamma[l]
        dz = cache.inv_std[l] / B * (B * dxhat - dxhat.sum(axis=0) - xhat * np.sum(dxhat * xhat, axis=0))
        grads_rev += [dbeta, dgamma, dz.sum(axis=0), cache.inputs[l].T @ dz]
        dh = dz @ net.W[l].T
    return grads_rev[::-1]


@dataclass
class AdamState:
    m: list[np.ndarray]
    v: list[np.ndarray]
    t: int = 0

    @classmethod
    def zeros_like(cls, net: Network) -> "AdamState":
        return cls([np.zeros_like(p) for p in net.params()], [np.zeros_like(p) for p in net.params()])


def adam_step(net: Network, grads: list[np.ndarray], state: AdamState, lr: float = 1e-3,
              beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8) -> AdamState:
    params = net.params()
    if len(grads) != len(params) or any(g.shape != p.shape for g, p in zip(grads, params)):
        raise ValueError("gradient shapes do not match the network")
    state.t += 1
    c1 = 1 - beta1 ** state.t
    c2 = 1 - beta2 ** state.t
    for p, g, m, v in zip(params, grads, state.m, state.v):
        m *= beta1
        m += (1 - beta1) * g
        v *= beta2
        v += (1 - beta2) * g * g
        p -= lr * (m / c1) / (np.sqrt(v / c2) + eps)
    return state


# ---------------------------------------------------------------- training


# (code, noise, d) -> (hidden layers, width, batch size, steps)
TABLE_CONFIGS = {
    ("color", "bitphase", 5): (3, 100, 1000, 30_000),
    ("color", "bitphase", 7): (5, 200, 5000, 50_000),
    ("color", "bitphase", 9): (7, 400, 10_000, 110_000),
    ("color", "bitphase", 11): (9, 800, 10_000, 210_000),
    ("color", "depol", 5): (3, 200, 10_000, 110_000),
    ("color", "depol", 7): (5, 600, 10_000, 300_000),
    ("color", "depol", 9): (7, 1400, 10_000, 410_000),
    ("color", "nn-depol", 5): (3, 200, 5000, 60_000),
    ("color", "nn-depol", 7): (5, 400, 10_000, 110_000),
    ("color", "nn-depol", 9): (7, 800, 10_000, 210_000),
    ("color", "nn-depol", 11): (9, 1600, 10_000, 410_000),
    ("toric", "bitphase", 5): (3, 100, 1000, 30_000),
    ("toric", "bitphase", 7): (5, 200, 10_000, 60_000),
    ("toric", "bitphase", 9): (7, 400, 10_000, 160_000),
    ("toric", "bitphase", 11): (9, 800, 10_000, 260_000),
    ("toric", "depol", 5): (3, 200, 5000, 30_000),
    ("toric", "depol", 7): (5, 600, 10_000, 110_000),
    ("toric", "depol", 9): (7, 1200, 10_000, 210_000),
    ("toric", "nn-depol", 5): (3, 200, 5000, 60_000),
    ("toric", "nn-depol", 7): (5, 400, 10_000, 110_000),
    ("toric", "nn-depol", 9): (7, 800, 10_000, 210_000),
    ("toric", "nn-depol", 11): (9, 1600, 10_000, 410_000),
}

HEURISTIC_WIDTH_SCALE = 50.0


class TrainingDiverged(RuntimeError):
    pass


@dataclass
class TrainingConfig:
    hidden_layers: int
    width: int
    batch_size: int
    steps: int
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    adam_eps: float = 1e-8
    bn_momentum: float = 0.9
    curriculum: bool = True
    # explicit (p_eff, steps) stages; empty means the default two-stage schedule
    stages: tuple[tuple[float, int], ...] = ()
    log_every: int = 100
    dtype: str = "float64"

    def __post_init__(self):
        if min(self.hidden_layers, self.width, self.batch_size, self.steps) < 1:
            raise ValueError("hidden_layers, width, batch_size and steps must be positive")
        if self.batch_size < 2:
            raise ValueError("batch normalisation needs batches of at least 2")
        if self.stages:
            if sum(s for _, s in self.stages) != self.steps:
                raise ValueError("curriculum stage steps must sum to the total step count")
            rates = [p for p, _ in self.stages]
            if rates != sorted(rates):
                raise ValueError("curriculum stages must be nondecreasing in p_eff")
        if self.batch_size < MIN_BATCH_WARN:
            warnings.warn(f"batch size {self.batch_size} is small; gradient estimates may be too noisy",
                          stacklevel=2)

    def schedule(self, target_p_eff: float) -> list[tuple[float, int]]:
        if self.stages:
            return list(self.stages)
        if not self.curriculum:
            return [(target_p_eff, self.steps)]
        first = math.ceil(self.steps / 3)
        sched = [(target_p_eff / 2, first)]
        if self.steps > first:
            sched.append((target_p_eff, self.steps - first))
        return sched


def default_config(code: str, noise: str, d: int, **overrides) -> TrainingConfig:
    """Tabulated hyperparameters, or ``H = d - 2`` and ``N ~ 2^(d/2)`` otherwise."""
    row = TABLE_CONFIGS.get((code, noise, d))
    if row is None:
        row = (max(1, d - 2), int(round(HEURISTIC_WIDTH_SCALE * 2 ** (d / 2))), 10_000, 410_000)
    H, N, B, T = row
    kw = dict(hidden_layers=H, width=N, batch_size=B, steps=T)
    kw.update(overrides)
    return TrainingConfig(**kw)


def labelled_batch(lattice: CodeLattice, graph: ExcitationGraph, noise: NoiseModel,
                   rng: np.random.Generator, size: int) -> tuple[np.ndarray, np.ndarray]:
    """Fresh (syndromes, class labels) with labels = class of R_U * Q."""
    errors = sample_batch(noise, lattice, rng, size)
    syn = batch_syndrome(errors, lattice.stabilizers)
    residual = batch_removal(syn, graph) ^ errors
    return syn, batch_logical_class(residual, lattice.logical_x, lattice.logical_z)


@dataclass
class TrainingLog:
    records: list[dict] = field(default_factory=list)
    samples_seen: int = 0
    schedule: list[tuple[float, int]] = field(default_factory=list)

    @property
    def final_accuracy(self) -> float:
        return self.records[-1]["accuracy"] if self.records else float("nan")


def train(lattice: CodeLattice, graph: ExcitationGraph, noise: NoiseModel, config: TrainingConfig,
          seed: int, callback=None) -> tuple[Network, TrainingLog]:
    """Mini-batch Adam on freshly sampled data following the curriculum.

    ``noise`` fixes the model family and the target rate; each curriculum stage
    resamples at its own effective rate.
    """
    bulk = lattice.bulk_neighbor_count
    target = effective_rate(noise, bulk)
    schedule = config.schedule(target)
    net = Network(len(lattice.stabilizers), [config.width] * config.hidden_layers,
                  bn_momentum=config.bn_momentum, dtype=np.dtype(config.dtype))
    net.fingerprint = lattice.fingerprint
    he_init(net, rngmod.stream(seed, rngmod.INIT))
    state = AdamState.zeros_like(net)
    tlog = TrainingLog(schedule=schedule)
    step = 0
    window_loss = window_acc = 0.0
    window_n = 0
    for stage, (p_eff, n_steps) in enumerate(schedule):
        stage_noise = NoiseModel(noise.kind, rate_from_effective(noise.kind, p_eff, bulk))
        for _ in range(n_steps):
            r = rngmod.stream(seed, rngmod.TRAIN, step)
            x, y = labelled_batch(lattice, graph, stage_noise, r, config.batch_size)
            probs, cache = forward(net, x, "train")
            value = loss(probs, y)
            if not math.isfinite(value):
                raise TrainingDiverged(f"non-finite loss {value} at step {step} (stage {stage}, p_eff={p_eff})")
            grads = backprop(net, cache, y)
            adam_step(net, grads, state, config.learning_rate, config.beta1, config.beta2, config.adam_eps)
            tlog.samples_seen += config.batch_size
            window_loss += value
            window_acc += float(np.mean(np.argmax(probs, axis=1) == y))
            window_n += 1
            step += 1
            if step % config.log_every == 0 or step == config.steps:
                rec = {"step": step, "stage": stage, "p_eff": p_eff,
                       "loss": window_loss / window_n, "accuracy": window_acc / window_n}
                tlog.records.append(rec)
                log.info("step %d stage %d loss %.5f acc %.4f", step, stage, rec["loss"], rec["accuracy"])
                if callback is not None:
                    callback(rec)
                window_loss = window_acc = 0.0
                window_n = 0
    return net, tlog


def predict(net: Network, syndromes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Argmax classes (ties resolve to the lowest of I, X, Y, Z) and probabilities."""
    probs = forward(net, np.atleast_2d(syndromes), "infer")
    return np.argmax(probs, axis=1), probs


def accuracy(net: Network, syndromes: np.ndarray, labels: np.ndarray) -> float:
    return float(np.mean(predict(net, syndromes)[0] == labels))


# ---------------------------------------------------------------- model files

MAGIC = b"TOPODEC-MLP\x00"
FORMAT_VERSION = 1


def _write_json(buf, obj) -> None:
    raw = json.dumps(obj, sort_keys=True).encode()
    buf.write(struct.pack("<I", len(raw)))
    buf.write(raw)


def _read_json(buf):
    (size,) = struct.unpack("<I", buf.read(4))
    return json.loads(buf.read(size).decode())


def save_model(net: Network, path, metadata: dict | None = None) -> None:
    buf = io.BytesIO()
    buf.write(MAGIC)
    buf.write(struct.pack("<I", FORMAT_VERSION))
    _write_json(buf, {"fingerprint": net.fingerprint, "input_dim": net.input_dim, "hidden": net.hidden,
                      "n_classes": net.n_classes, "bn_momentum": net.bn_momentum, "bn_eps": net.bn_eps,
                      "dtype": net.dtype.name})
    for arr in net.params() + net.running_stats():
        buf.write(np.ascontiguousarray(arr, dtype="<f8").tobytes())
    _write_json(buf, metadata or {})
    with open(path, "wb") as fh:
        fh.write(buf.getvalue())


def load_model(path, lattice: CodeLattice | None = None) -> tuple[Network, dict]:
    with open(path, "rb") as fh:
        buf = io.BytesIO(fh.read())
    if buf.read(len(MAGIC)) != MAGIC:
        raise ValueError(f"{path} is not a topodec model file")
    (version,) = struct.unpack("<I", buf.read(4))
    if version != FORMAT_VERSION:
        raise ValueError(f"unsupported model format version {version}")
    head = _read_json(buf)
    if lattice is not None and head["fingerprint"] != lattice.fingerprint:
        raise ValueError(f"model was trained on lattice {head['fingerprint']}, not {lattice.fingerprint}")
    net = Network(head["input_dim"], head["hidden"], head["n_classes"], head["bn_momentum"], head["bn_eps"],
                  np.dtype(head["dtype"]))
    net.fingerprint = head["fingerprint"]
    for arr in net.params() + net.running_stats():
        raw = buf.read(arr.size * 8)
        if len(raw) != arr.size * 8:
            raise ValueError("model file is truncated")
        arr[...] = np.frombuffer(raw, dtype="<f8").reshape(arr.shape)
    return net, _read_json(buf)


def config_metadata(config: TrainingConfig, tlog: TrainingLog | None = None, **extra) -> dict:
    meta = {"config": asdict(config)}
    if tlog is not None:
        meta["samples_seen"] = tlog.samples_seen
        meta["schedule"] = [list(s) for s in tlog.schedule]
        meta["final_accuracy"] = tlog.final_accuracy
    meta.update(extra)
    return meta
