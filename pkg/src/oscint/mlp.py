"""Fully connected feed-forward regressor trained from scratch.

The network maps the ``n_in`` sampled integrand values to one integral
estimate: H ReLU hidden layers of N neurons each and a linear scalar
output.  Inputs are z-scored per feature and targets divided by their
training RMS; training minimizes MSE on the scaled targets with mini-batch
gradient descent using bias-corrected first/second moment accumulators
(decay 0.9/0.999, epsilon 1e-8).  Reported histories always use the
normalized MSE of the unscaled integrals, which is the quantity every
comparison in this package is stated in.

Also houses the two closed-form cost models: ``nn_flops`` with the headline
aggregate formula (4N+2) N^2 H (1+n_q) plus a literal per-inference
operation count, and ``memory_bytes`` for the parameter footprint.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Tuple

import numpy as np

from .dataset import SplitDataset
from .errors import CorruptModel, DivergedLoss, ShapeMismatch, VersionMismatch
from .metrics import normalized_mse

__all__ = [
    "Architecture",
    "MlpNetwork",
    "TrainConfig",
    "TrainReport",
    "FlopMode",
    "init",
    "forward",
    "gradient",
    "train",
    "nn_flops",
    "memory_bytes",
    "save",
    "load",
]


@dataclass(frozen=True)
class Architecture:
    n_in: int
    hidden_layers: int  # H
    neurons: int        # N

    def __post_init__(self):
        if self.n_in < 1 or self.hidden_layers < 1 or self.neurons < 1:
            raise ValueError(f"architecture fields must be >= 1, got {self}")

    @property
    def weight_shapes(self) -> List[Tuple[int, int]]:
        shapes = [(self.neurons, self.n_in)]
        shapes += [(self.neurons, self.neurons)] * (self.hidden_layers - 1)
        shapes.append((1, self.neurons))
        return shapes


@dataclass
class MlpNetwork:
    arch: Architecture
    weights: List[np.ndarray]
    biases: List[np.ndarray]
    input_mean: np.ndarray
    input_std: np.ndarray
    target_scale: float = 1.0

    def copy(self) -> "MlpNetwork":
        return MlpNetwork(
            arch=self.arch,
            weights=[w.copy() for w in self.weights],
            biases=[b.copy() for b in self.biases],
            input_mean=self.input_mean.copy(),
            input_std=self.input_std.copy(),
            target_scale=self.target_scale,
        )


@dataclass(frozen=True)
class TrainConfig:
    # the stagnation window must outlast the transient plateaus this loss
    # surface shows around NMSE ~2e-3; 50-epoch windows stop inside them
    learning_rate: float = 1e-4
    batch_size: int = 64
    max_epochs: int = 20000
    stagnation_window: int = 500
    stagnation_rel_tol: float = 1e-4
    seed: int = 0

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError(f"learning_rate must be positive, got {self.learning_rate}")


@dataclass
class TrainReport:
    epochs_run: int
    train_nmse_history: np.ndarray
    val_nmse_history: np.ndarray
    final_train_nmse: float
    final_val_nmse: float
    best_epoch: int = 0
    diverged: bool = field(default=False, compare=False)


class FlopMode(Enum):
    PAPER = "paper"   # headline aggregate cost formula
    EXACT = "exact"   # literal per-inference operation count


def init(arch: Architecture, seed: int) -> MlpNetwork:
    """Uniform +-sqrt(6/(fan_in+fan_out)) weights, zero biases, identity scalers."""
    rng = np.random.default_rng(int(seed))
    weights = []
    biases = []
    for rows, cols in arch.weight_shapes:
        bound = math.sqrt(6.0 / (rows + cols))
        weights.append(rng.uniform(-bound, bound, size=(rows, cols)))
        biases.append(np.zeros(rows))
    return MlpNetwork(
        arch=arch,
        weights=weights,
        biases=biases,
        input_mean=np.zeros(arch.n_in),
        input_std=np.ones(arch.n_in),
        target_scale=1.0,
    )


def _forward_scaled(net: MlpNetwork, x: np.ndarray) -> np.ndarray:
    """Batch forward pass in scaled space; x is (B, n_in) already z-scored."""
    a = x
    for w, b in zip(net.weights[:-1], net.biases[:-1]):
        a = np.maximum(a @ w.T + b, 0.0)
    return (a @ net.weights[-1].T + net.biases[-1]).ravel()


def forward(net: MlpNetwork, inputs) -> float | np.ndarray:
    """Integral estimate(s) for raw input vector(s)."""
    x = np.asarray(inputs, dtype=float)
    single = x.ndim == 1
    x = np.atleast_2d(x)
    if x.shape[1] != net.arch.n_in:
        raise ShapeMismatch(f"expected {net.arch.n_in} inputs, got {x.shape[1]}")
    z = (x - net.input_mean) / net.input_std
    out = _forward_scaled(net, z) * net.target_scale
    return float(out[0]) if single else out


def gradient(net: MlpNetwork, inputs, targets) -> List[Tuple[np.ndarray, np.ndarray]]:
    """Per-layer (dW, db) of the scaled-target MSE loss on one batch.

    The loss is mean((f(x) - y / target_scale)^2) over the batch, with f the
    scaled-space forward pass; raw inputs are z-scored here.
    """
    x = np.atleast_2d(np.asarray(inputs, dtype=float))
    y = np.asarray(targets, dtype=float).ravel()
    if x.shape[0] != y.size or x.shape[0] == 0:
        raise ShapeMismatch(f"batch of {x.shape[0]} inputs vs {y.size} targets")
    z = (x - net.input_mean) / net.input_std
    t = y / net.target_scale

    pre = []
    acts = [z]
    a = z
    for w, b in zip(net.weights[:-1], net.biases[:-1]):
        s = a @ w.T + b
        pre.append(s)
        a = np.maximum(s, 0.0)
        acts.append(a)
    out = (a @ net.weights[-1].T + net.biases[-1]).ravel()

    delta = (2.0 / x.shape[0]) * (out - t)[:, None]  # (B, 1)
    grads: List[Tuple[np.ndarray, np.ndarray]] = [None] * len(net.weights)
    grads[-1] = (delta.T @ acts[-1], delta.sum(axis=0))
    back = delta @ net.weights[-1]
    for layer in range(len(net.weights) - 2, -1, -1):
        back = back * (pre[layer] > 0.0)
        grads[layer] = (back.T @ acts[layer], back.sum(axis=0))
        if layer > 0:
            back = back @ net.weights[layer]
    return grads


class _Layout:
    """Offsets of every weight matrix and bias vector in one flat array."""

    def __init__(self, arch: Architecture):
        self.shapes = arch.weight_shapes
        self.w_spans = []
        offset = 0
        for rows, cols in self.shapes:
            self.w_spans.append((offset, rows, cols))
            offset += rows * cols
        self.b_spans = []
        for rows, _ in self.shapes:
            self.b_spans.append((offset, rows))
            offset += rows
        self.size = offset

    def w_views(self, vec: np.ndarray) -> List[np.ndarray]:
        return [vec[o : o + r * c].reshape(r, c) for o, r, c in self.w_spans]

    def b_views(self, vec: np.ndarray) -> List[np.ndarray]:
        return [vec[o : o + r] for o, r in self.b_spans]


def _epoch_nmse(net: MlpNetwork, scaled_x: np.ndarray, truths: np.ndarray) -> float:
    preds = _forward_scaled(net, scaled_x) * net.target_scale
    return normalized_mse(preds, truths)


def train(
    net: MlpNetwork, data: SplitDataset, cfg: TrainConfig
) -> Tuple[MlpNetwork, TrainReport]:
    """Fit scalers and weights on the train split; keep the best-validation snapshot.

    Stops at ``max_epochs`` or once the train NMSE has improved by less than
    ``stagnation_rel_tol`` relative over the last ``stagnation_window``
    epochs.  Raises DivergedLoss if the loss leaves the floats.  The input
    network is not modified; the fitted one is returned.
    """
    if len(data.train) == 0:
        raise ValueError("empty training split")
    if data.train.n_in != net.arch.n_in:
        raise ShapeMismatch(
            f"network expects n_in={net.arch.n_in}, dataset has {data.train.n_in}"
        )
    net = net.copy()
    x_raw = data.train.inputs
    mean = x_raw.mean(axis=0)
    std = np.maximum(x_raw.std(axis=0), 1e-12)
    scale = float(np.sqrt(np.mean(data.train.truths**2)))
    net.input_mean, net.input_std = mean, std
    net.target_scale = scale if scale > 0 else 1.0

    x = (x_raw - mean) / std
    t = data.train.truths / net.target_scale
    x_val = (data.val.inputs - mean) / std if len(data.val) else None

    layout = _Layout(net.arch)
    theta = np.empty(layout.size)
    w_views = layout.w_views(theta)
    b_views = layout.b_views(theta)
    for view, w in zip(w_views, net.weights):
        view[...] = w
    for view, b in zip(b_views, net.biases):
        view[...] = b
    live = MlpNetwork(
        arch=net.arch, weights=w_views, biases=b_views,
        input_mean=mean, input_std=std, target_scale=net.target_scale,
    )
    grad = np.zeros(layout.size)
    gw = layout.w_views(grad)
    gb = layout.b_views(grad)
    m1 = np.zeros(layout.size)
    m2 = np.zeros(layout.size)
    beta1, beta2, eps = 0.9, 0.999, 1e-8
    lr = cfg.learning_rate
    rng = np.random.default_rng(int(cfg.seed))
    n = x.shape[0]
    batch = max(1, min(int(cfg.batch_size), n))
    n_layers = len(w_views)

    train_hist: List[float] = []
    val_hist: List[float] = []
    best_val = math.inf
    best_theta = theta.copy()
    best_epoch = 0
    before_min = math.inf
    step = 0

    with np.errstate(over="ignore", invalid="ignore"):  # divergence is handled
        for epoch in range(int(cfg.max_epochs)):
            perm = rng.permutation(n)
            for start in range(0, n, batch):
                idx = perm[start : start + batch]
                xb = x[idx]
                tb = t[idx]

                pre = []
                acts = [xb]
                a = xb
                for w, b in zip(w_views[:-1], b_views[:-1]):
                    s = a @ w.T + b
                    pre.append(s)
                    a = np.maximum(s, 0.0)
                    acts.append(a)
                out = (a @ w_views[-1].T + b_views[-1]).ravel()
                err = out - tb
                loss = float(err @ err) / idx.size
                if not math.isfinite(loss):
                    raise DivergedLoss(f"non-finite loss at epoch {epoch}", epoch=epoch)

                delta = (2.0 / idx.size) * err[:, None]
                np.matmul(delta.T, acts[-1], out=gw[-1])
                gb[-1][...] = delta.sum(axis=0)
                back = delta @ w_views[-1]
                for layer in range(n_layers - 2, -1, -1):
                    back *= pre[layer] > 0.0
                    np.matmul(back.T, acts[layer], out=gw[layer])
                    gb[layer][...] = back.sum(axis=0)
                    if layer > 0:
                        back = back @ w_views[layer]

                step += 1
                m1 *= beta1
                m1 += (1.0 - beta1) * grad
                m2 *= beta2
                m2 += (1.0 - beta2) * grad * grad
                denom = np.sqrt(m2 / (1.0 - beta2**step))
                denom += eps
                theta -= (lr / (1.0 - beta1**step)) * m1 / denom

            train_nmse = _epoch_nmse(live, x, data.train.truths)
            if not math.isfinite(train_nmse):
                raise DivergedLoss(f"non-finite train NMSE at epoch {epoch}", epoch=epoch)
            val_nmse = (
                _epoch_nmse(live, x_val, data.val.truths) if x_val is not None else train_nmse
            )
            train_hist.append(train_nmse)
            val_hist.append(val_nmse)
            if val_nmse < best_val:
                best_val = val_nmse
                best_theta[...] = theta
                best_epoch = epoch
            # stagnation on the running minimum: epoch-to-epoch NMSE is noisy
            # under mini-batching, the best-so-far is what actually plateaus
            window = cfg.stagnation_window
            if epoch >= window:
                before_min = min(before_min, train_hist[epoch - window])
                recent = min(train_hist[epoch - window + 1 :])
                if before_min <= 0 or (before_min - recent) / before_min < cfg.stagnation_rel_tol:
                    break

    theta[...] = best_theta
    for w, view in zip(net.weights, w_views):
        w[...] = view
    for b, view in zip(net.biases, b_views):
        b[...] = view
    report = TrainReport(
        epochs_run=len(train_hist),
        train_nmse_history=np.array(train_hist),
        val_nmse_history=np.array(val_hist),
        final_train_nmse=train_hist[-1],
        final_val_nmse=val_hist[-1],
        best_epoch=best_epoch,
    )
    return net, report


def nn_flops(N: int, H: int, n_q: int, mode: FlopMode = FlopMode.PAPER) -> int:
    """Inference cost of an (N neurons, H hidden layers, n_q inputs) network.

    PAPER mode is the aggregate closed form (4N+2) * N^2 * H * (1 + n_q)
    used for the headline efficiency numbers; EXACT mode counts literal
    per-inference operations: the first layer costs N*(2*n_q) plus N adds
    plus N ReLU, each hidden-to-hidden layer N*(2N+1) + N, and the output
    node 2N + 1.
    """
    N, H, n_q = int(N), int(H), int(n_q)
    if min(N, H, n_q) < 1:
        raise ValueError(f"need N, H, n_q >= 1, got N={N}, H={H}, n_q={n_q}")
    if mode is FlopMode.PAPER:
        return (4 * N + 2) * N * N * H * (1 + n_q)
    first = N * (2 * n_q) + N + N
    hidden = (H - 1) * (N * (2 * N + 1) + N)
    output = 2 * N + 1
    return first + hidden + output


def memory_bytes(N: int, L: int) -> int:
    """Parameter bytes of an L-layer, N-neuron network at 4 bytes per float."""
    N, L = int(N), int(L)
    if N < 1 or L < 2:
        raise ValueError(f"need N >= 1 and L >= 2, got N={N}, L={L}")
    return 4 * (N * N * (L - 1) + N * (L - 2))


_FORMAT_VERSION = 1


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def save(net: MlpNetwork, path) -> None:
    """Line-oriented text format; round-trips forward outputs bit-exactly."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"version {_FORMAT_VERSION}\n")
        a = net.arch
        fh.write(f"arch {a.n_in} {a.hidden_layers} {a.neurons}\n")
        fh.write("input_mean " + " ".join(_fmt(v) for v in net.input_mean) + "\n")
        fh.write("input_std " + " ".join(_fmt(v) for v in net.input_std) + "\n")
        fh.write(f"target_scale {_fmt(net.target_scale)}\n")
        for i, (w, b) in enumerate(zip(net.weights, net.biases)):
            fh.write(f"layer {i} {w.shape[0]} {w.shape[1]}\n")
            for row in w:
                fh.write("W " + " ".join(_fmt(v) for v in row) + "\n")
            fh.write("b " + " ".join(_fmt(v) for v in b) + "\n")


def _expect(line: str | None, prefix: str) -> List[str]:
    if line is None:
        raise CorruptModel(f"unexpected end of file, wanted '{prefix}'")
    parts = line.split()
    if not parts or parts[0] != prefix:
        raise CorruptModel(f"expected '{prefix}' line, got {line[:40]!r}")
    return parts[1:]


def load(path) -> MlpNetwork:
    """Inverse of save; raises VersionMismatch/CorruptModel on bad files."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    it = iter(lines)

    def nxt():
        return next(it, None)

    version = _expect(nxt(), "version")
    try:
        file_version = int(version[0])
    except (IndexError, ValueError):
        raise CorruptModel("bad version line") from None
    if file_version != _FORMAT_VERSION:
        raise VersionMismatch(f"unsupported model version {file_version}")
    try:
        n_in, hidden, neurons = (int(v) for v in _expect(nxt(), "arch"))
        arch = Architecture(n_in, hidden, neurons)
        mean = np.array([float(v) for v in _expect(nxt(), "input_mean")])
        std = np.array([float(v) for v in _expect(nxt(), "input_std")])
        scale = float(_expect(nxt(), "target_scale")[0])
        if mean.size != n_in or std.size != n_in:
            raise CorruptModel("scaler length does not match n_in")
        weights = []
        biases = []
        for i, (rows, cols) in enumerate(arch.weight_shapes):
            idx, r, c = (int(v) for v in _expect(nxt(), "layer"))
            if (idx, r, c) != (i, rows, cols):
                raise CorruptModel(
                    f"layer {i}: expected shape {rows}x{cols}, file says {r}x{c}"
                )
            w = np.empty((rows, cols))
            for j in range(rows):
                vals = [float(v) for v in _expect(nxt(), "W")]
                if len(vals) != cols:
                    raise CorruptModel(f"layer {i} row {j}: wrong width")
                w[j] = vals
            b = np.array([float(v) for v in _expect(nxt(), "b")])
            if b.size != rows:
                raise CorruptModel(f"layer {i}: wrong bias length")
            weights.append(w)
            biases.append(b)
    except CorruptModel:
        raise
    except (ValueError, IndexError) as exc:
        raise CorruptModel(f"unparseable model file: {exc}") from None
    return MlpNetwork(
        arch=arch,
        weights=weights,
        biases=biases,
        input_mean=mean,
        input_std=std,
        target_scale=scale,
    )
