"""Fully connected feed-forward regressor trained by backpropagation.

Default architecture [6, 100, 100, 100, 2]: three rectifier hidden layers
of 100 units and a linear output.  The optimizer is SGD with momentum,

    v <- mu * v - lr * g        (g already includes the L2 term)
    w <- w + v

and the objective is

    L = (1 / 2n) * sum ||y_hat - y||^2  +  (lambda / 2) * sum ||W||^2

with the penalty on weights only, biases excluded.  All randomness
(initial weights, epoch shuffles) flows through gaitreg.rng streams; the
rectifier subgradient at exactly 0 is taken as 0.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import ConfigError, TrainError
from .ioutil import atomic_write_text
from .rng import SplitMix64, derive_seed

DEFAULT_LAYER_DIMS = (6, 100, 100, 100, 2)


@dataclass
class MlpModel:
    """Weight matrices W_l (fan_out x fan_in) and bias vectors b_l."""

    layer_dims: tuple[int, ...]
    weights: list[np.ndarray]
    biases: list[np.ndarray]

    def n_layers(self) -> int:
        return len(self.weights)

    def copy(self) -> "MlpModel":
        return MlpModel(
            self.layer_dims,
            [w.copy() for w in self.weights],
            [b.copy() for b in self.biases],
        )


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 30
    learning_rate: float = 1e-4
    momentum: float = 0.9
    l2_penalty: float = 1e-2
    batch_size: int = 16
    shuffle_seed: int = 7140

    def __post_init__(self):
        if self.epochs < 1 or self.batch_size < 1:
            raise ConfigError("epochs and batch_size must be positive")
        if self.learning_rate <= 0.0:
            raise ConfigError(f"learning_rate must be positive, got {self.learning_rate}")
        if not 0.0 <= self.momentum < 1.0:
            raise ConfigError(f"momentum must be in [0, 1), got {self.momentum}")
        if self.l2_penalty < 0.0:
            raise ConfigError(f"l2_penalty must be >= 0, got {self.l2_penalty}")


@dataclass
class OptimizerState:
    """Velocity buffers mirroring every parameter, zero-initialized."""

    vel_weights: list[np.ndarray]
    vel_biases: list[np.ndarray]

    @classmethod
    def zeros_like(cls, model: MlpModel) -> "OptimizerState":
        return cls(
            [np.zeros_like(w) for w in model.weights],
            [np.zeros_like(b) for b in model.biases],
        )


def init(layer_dims: Sequence[int] = DEFAULT_LAYER_DIMS, init_seed: int = 1) -> MlpModel:
    """Uniform +-sqrt(6 / (fan_in + fan_out)) weights, zero biases.

    One splitmix64 stream seeded with init_seed fills the layers in order,
    each weight matrix row-major, so a seed pins every parameter.
    """
    dims = tuple(int(d) for d in layer_dims)
    if len(dims) < 2 or any(d < 1 for d in dims):
        raise ConfigError(f"layer_dims must list >= 2 positive sizes, got {dims}")
    stream = SplitMix64(init_seed)
    weights = []
    biases = []
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        bound = np.sqrt(6.0 / (fan_in + fan_out))
        u = stream.uniform_block(fan_out * fan_in)
        weights.append((bound * (2.0 * u - 1.0)).reshape(fan_out, fan_in))
        biases.append(np.zeros(fan_out))
    return MlpModel(dims, weights, biases)


def _forward_pass(model: MlpModel, x: np.ndarray):
    """Returns (activations per layer including input, pre-activations)."""
    acts = [x]
    pres = []
    h = x
    last = model.n_layers() - 1
    for l, (w, b) in enumerate(zip(model.weights, model.biases)):
        z = h @ w.T + b
        if not np.all(np.isfinite(z)):
            raise TrainError(f"non-finite values at layer {l}")
        pres.append(z)
        h = z if l == last else np.maximum(z, 0.0)
        acts.append(h)
    return acts, pres


def forward(model: MlpModel, x: np.ndarray) -> np.ndarray:
    """Evaluate the network on one input vector or a batch of rows."""
    x = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(x)):
        raise TrainError("non-finite input to forward pass")
    single = x.ndim == 1
    if single:
        x = x[None, :]
    if x.shape[1] != model.layer_dims[0]:
        raise ConfigError(f"input width {x.shape[1]} != model input {model.layer_dims[0]}")
    acts, _ = _forward_pass(model, x)
    out = acts[-1]
    return out[0] if single else out


def loss_and_gradient(
    model: MlpModel, x: np.ndarray, y: np.ndarray, l2_penalty: float
) -> tuple[float, tuple[list[np.ndarray], list[np.ndarray]]]:
    """Objective and its gradient on one batch by reverse accumulation."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.ndim != 2 or y.ndim != 2 or x.shape[0] != y.shape[0]:
        raise ConfigError(f"batch shapes {x.shape} / {y.shape} do not align")
    n = x.shape[0]
    acts, pres = _forward_pass(model, x)
    resid = acts[-1] - y
    data_loss = 0.5 * float(np.sum(resid**2)) / n
    reg_loss = 0.5 * l2_penalty * sum(float(np.sum(w**2)) for w in model.weights)

    grad_w = [np.empty(0)] * model.n_layers()
    grad_b = [np.empty(0)] * model.n_layers()
    delta = resid / n
    for l in range(model.n_layers() - 1, -1, -1):
        if l < model.n_layers() - 1:
            delta = delta * (pres[l] > 0.0)  # rectifier subgradient, 0 at 0
        grad_w[l] = delta.T @ acts[l] + l2_penalty * model.weights[l]
        grad_b[l] = delta.sum(axis=0)
        if l > 0:
            delta = delta @ model.weights[l]
    return data_loss + reg_loss, (grad_w, grad_b)


def sgd_step(
    model: MlpModel,
    state: OptimizerState,
    grads: tuple[list[np.ndarray], list[np.ndarray]],
    config: TrainConfig,
) -> tuple[MlpModel, OptimizerState]:
    """One momentum update in place; returns the same objects."""
    grad_w, grad_b = grads
    mu = config.momentum
    lr = config.learning_rate
    for l in range(model.n_layers()):
        state.vel_weights[l] *= mu
        state.vel_weights[l] -= lr * grad_w[l]
        model.weights[l] += state.vel_weights[l]
        state.vel_biases[l] *= mu
        state.vel_biases[l] -= lr * grad_b[l]
        model.biases[l] += state.vel_biases[l]
    return model, state


def train(
    model: MlpModel,
    x: np.ndarray,
    y: np.ndarray,
    config: TrainConfig,
) -> tuple[MlpModel, list[float]]:
    """Mini-batch SGD for the configured number of epochs.

    Rows are reshuffled every epoch with the stream seeded from
    (shuffle_seed, epoch); the final partial batch is kept.  The returned
    trace holds one value per epoch: the batch-size-weighted mean of the
    objective over that epoch's mini-batches.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape[0] == 0:
        raise ConfigError("training set is empty")
    n = x.shape[0]
    state = OptimizerState.zeros_like(model)
    trace = []
    for epoch in range(config.epochs):
        perm = SplitMix64(derive_seed(config.shuffle_seed, epoch)).permutation(n)
        epoch_loss = 0.0
        for start in range(0, n, config.batch_size):
            rows = perm[start : start + config.batch_size]
            try:
                loss, grads = loss_and_gradient(model, x[rows], y[rows], config.l2_penalty)
            except TrainError as exc:
                raise TrainError(f"training diverged at epoch {epoch}: {exc}") from None
            if not np.isfinite(loss):
                raise TrainError(f"training diverged at epoch {epoch}: loss {loss}")
            sgd_step(model, state, grads, config)
            epoch_loss += loss * len(rows)
        trace.append(epoch_loss / n)
    return model, trace


def save_checkpoint(model: MlpModel, config: TrainConfig, path: str | Path) -> Path:
    """JSON checkpoint: layer dims, row-major weights, biases, train config."""
    payload = {
        "layer_dims": list(model.layer_dims),
        "weights": [w.ravel().tolist() for w in model.weights],
        "biases": [b.tolist() for b in model.biases],
        "train_config": {
            "epochs": config.epochs,
            "learning_rate": config.learning_rate,
            "momentum": config.momentum,
            "l2_penalty": config.l2_penalty,
            "batch_size": config.batch_size,
            "shuffle_seed": config.shuffle_seed,
        },
    }
    return atomic_write_text(path, json.dumps(payload, sort_keys=True))


def load_checkpoint(path: str | Path) -> tuple[MlpModel, TrainConfig]:
    with open(path, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    dims = tuple(payload["layer_dims"])
    weights = []
    biases = []
    for l, (fan_in, fan_out) in enumerate(zip(dims[:-1], dims[1:])):
        weights.append(np.asarray(payload["weights"][l], dtype=np.float64).reshape(fan_out, fan_in))
        biases.append(np.asarray(payload["biases"][l], dtype=np.float64))
    return MlpModel(dims, weights, biases), TrainConfig(**payload["train_config"])


def gradient_check(
    model: MlpModel,
    x: np.ndarray,
    y: np.ndarray,
    l2_penalty: float,
    samples_per_tensor: int = 50,
    step: float = 1e-5,
    seed: int = 99,
) -> tuple[bool, float]:
    """Compare analytic gradients to central finite differences.

    For each parameter tensor, up to samples_per_tensor entries are probed.
    Relative error per entry is |fd - g| / max(|g|, |fd|, 1e-3); the floor
    makes an absolute error of 1e-7 on a near-zero gradient count as 1e-4.
    Returns (all entries below 1e-4, max relative error).
    """
    _, (grad_w, grad_b) = loss_and_gradient(model, x, y, l2_penalty)
    tensors = [(model.weights[l], grad_w[l]) for l in range(model.n_layers())]
    tensors += [(model.biases[l], grad_b[l]) for l in range(model.n_layers())]
    stream = SplitMix64(seed)
    max_rel = 0.0
    for theta, grad in tensors:
        flat = theta.ravel()
        gflat = grad.ravel()
        count = min(samples_per_tensor, flat.size)
        picks = sorted(
            set(int(u * flat.size) for u in stream.uniform_block(2 * count))
        )[:count]
        for idx in picks:
            orig = flat[idx]
            flat[idx] = orig + step
            lo_hi, _ = loss_and_gradient(model, x, y, l2_penalty)
            flat[idx] = orig - step
            lo_lo, _ = loss_and_gradient(model, x, y, l2_penalty)
            flat[idx] = orig
            fd = (lo_hi - lo_lo) / (2.0 * step)
            rel = abs(fd - gflat[idx]) / max(abs(gflat[idx]), abs(fd), 1e-3)
            max_rel = max(max_rel, rel)
    return max_rel < 1e-4, max_rel
