"""From-scratch multilayer perceptron for binary classification.

Dense layers compute f(x W^T + b); hidden layers optionally apply batch
normalization between the affine map and the activation, then inverted
dropout after it.  The output layer is a single sigmoid probability.
Training minimizes mean binary cross-entropy via analytic
backpropagation and plain SGD steps (delta = -eta * gradient).

Everything is float64 and deterministic for a given RNG, which is what
makes the finite-difference gradient tests and reproducible training
runs possible.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from typing import Literal, Optional, Sequence

import numpy as np

__all__ = [
    "BatchNormState",
    "DenseLayer",
    "ForwardCache",
    "LayerGrads",
    "MlpModel",
    "backward",
    "build_model",
    "cross_entropy",
    "forward",
    "mean_cross_entropy",
    "predict",
    "sgd_step",
    "sigmoid",
]

PROB_EPS = 1e-12  # clamp for log arguments and reported probabilities

Mode = Literal["train", "infer"]
Verdict = Literal["benign", "malicious"]


def sigmoid(z: np.ndarray) -> np.ndarray:
    """Numerically stable logistic function."""
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


@dataclass
class BatchNormState:
    gamma: np.ndarray
    beta: np.ndarray
    running_mean: np.ndarray
    running_var: np.ndarray
    momentum: float = 0.1
    epsilon: float = 1e-5

    def __post_init__(self) -> None:
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if np.any(self.running_var < 0):
            raise ValueError("running variance must be non-negative")


@dataclass
class DenseLayer:
    weights: np.ndarray  # (out, in)
    biases: np.ndarray  # (out,)
    activation: Literal["relu", "sigmoid"]
    batch_norm: Optional[BatchNormState] = None
    dropout_rate: float = 0.0

    def __post_init__(self) -> None:
        self.weights = np.asarray(self.weights, dtype=np.float64)
        self.biases = np.asarray(self.biases, dtype=np.float64)
        if self.weights.ndim != 2 or self.biases.shape != (self.weights.shape[0],):
            raise ValueError("weight/bias shapes do not match")
        if not 0.0 <= self.dropout_rate < 1.0:
            raise ValueError("dropout_rate must be in [0, 1)")

    @property
    def in_width(self) -> int:
        return self.weights.shape[1]

    @property
    def out_width(self) -> int:
        return self.weights.shape[0]


@dataclass
class MlpModel:
    layers: list[DenseLayer]
    threshold: float = 0.62

    def __post_init__(self) -> None:
        if not self.layers:
            raise ValueError("model needs at least one layer")
        for a, b in zip(self.layers, self.layers[1:]):
            if a.out_width != b.in_width:
                raise ValueError(f"layer widths do not chain: {a.out_width} -> {b.in_width}")
        if self.layers[-1].activation != "sigmoid":
            raise ValueError("output layer must be sigmoid")
        if self.layers[-1].dropout_rate != 0.0:
            raise ValueError("output layer must not use dropout")
        if not 0.0 < self.threshold < 1.0:
            raise ValueError("threshold must be inside (0, 1)")

    @property
    def input_width(self) -> int:
        return self.layers[0].in_width

    @property
    def output_width(self) -> int:
        return self.layers[-1].out_width

    def widths(self) -> tuple[int, ...]:
        return (self.input_width,) + tuple(l.out_width for l in self.layers)

    def copy(self) -> "MlpModel":
        return copy.deepcopy(self)


def build_model(
    input_width: int = 48,
    hidden_widths: Sequence[int] = (72, 72),
    *,
    dropout_rate: float = 0.15,
    batch_norm: bool = True,
    threshold: float = 0.62,
    bn_momentum: float = 0.1,
    bn_epsilon: float = 1e-5,
    rng: Optional[np.random.Generator] = None,
) -> MlpModel:
    """Create a freshly initialized network.

    Weights start uniform in +-sqrt(6 / (fan_in + fan_out)), biases at 0,
    batch-norm scale at 1 and shift at 0.
    """
    rng = rng if rng is not None else np.random.default_rng(0)
    widths = [input_width, *hidden_widths, 1]
    layers = []
    for i in range(len(widths) - 1):
        fan_in, fan_out = widths[i], widths[i + 1]
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        weights = rng.uniform(-limit, limit, size=(fan_out, fan_in))
        last = i == len(widths) - 2
        bn = None
        if batch_norm and not last:
            bn = BatchNormState(
                gamma=np.ones(fan_out),
                beta=np.zeros(fan_out),
                running_mean=np.zeros(fan_out),
                running_var=np.ones(fan_out),
                momentum=bn_momentum,
                epsilon=bn_epsilon,
            )
        layers.append(
            DenseLayer(
                weights=weights,
                biases=np.zeros(fan_out),
                activation="sigmoid" if last else "relu",
                batch_norm=bn,
                dropout_rate=0.0 if last else dropout_rate,
            )
        )
    return MlpModel(layers=layers, threshold=threshold)


@dataclass
class _LayerCache:
    x: np.ndarray  # layer input
    z: np.ndarray  # affine output
    y: np.ndarray  # post batch-norm (== z when no batch norm)
    h: np.ndarray  # post activation
    bn_mean: Optional[np.ndarray] = None
    bn_inv_std: Optional[np.ndarray] = None
    bn_xhat: Optional[np.ndarray] = None
    dropout_mask: Optional[np.ndarray] = None


@dataclass
class ForwardCache:
    mode: Mode
    batch_size: int
    layers: list[_LayerCache] = field(default_factory=list)
    probs_raw: Optional[np.ndarray] = None  # pre-clamp sigmoid outputs
    widths: tuple[int, ...] = ()


def forward(
    model: MlpModel,
    batch: np.ndarray,
    mode: Mode = "infer",
    rng: Optional[np.random.Generator] = None,
) -> tuple[np.ndarray, ForwardCache]:
    """Run the network over a batch of rows.

    Train mode normalizes with batch statistics (updating the running
    ones) and applies inverted dropout from ``rng``; infer mode uses the
    running statistics, applies no dropout and leaves the model untouched.
    Returns probabilities clamped into (0, 1) plus the cache backward needs.
    """
    X = np.asarray(batch, dtype=np.float64)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2 or X.shape[1] != model.input_width:
        raise ValueError(f"batch must be (n, {model.input_width}), got {X.shape}")
    if mode not in ("train", "infer"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "train" and rng is None and any(l.dropout_rate > 0 for l in model.layers):
        raise ValueError("train mode with dropout needs an rng")

    cache = ForwardCache(mode=mode, batch_size=X.shape[0], widths=model.widths())
    out = X
    for layer in model.layers:
        x = out
        z = x @ layer.weights.T + layer.biases
        lc = _LayerCache(x=x, z=z, y=z, h=z)
        if layer.batch_norm is not None:
            bn = layer.batch_norm
            if mode == "train":
                mean = z.mean(axis=0)
                var = z.var(axis=0)
                bn.running_mean = (1.0 - bn.momentum) * bn.running_mean + bn.momentum * mean
                bn.running_var = (1.0 - bn.momentum) * bn.running_var + bn.momentum * var
            else:
                mean = bn.running_mean
                var = bn.running_var
            inv_std = 1.0 / np.sqrt(var + bn.epsilon)
            xhat = (z - mean) * inv_std
            lc.y = bn.gamma * xhat + bn.beta
            if mode == "train":
                lc.bn_mean, lc.bn_inv_std, lc.bn_xhat = mean, inv_std, xhat
        lc.h = np.maximum(lc.y, 0.0) if layer.activation == "relu" else sigmoid(lc.y)
        out = lc.h
        if mode == "train" and layer.dropout_rate > 0.0:
            keep = 1.0 - layer.dropout_rate
            mask = (rng.random(out.shape) >= layer.dropout_rate).astype(np.float64)
            lc.dropout_mask = mask
            out = out * mask / keep
        cache.layers.append(lc)

    probs_raw = out[:, 0]
    cache.probs_raw = probs_raw
    probs = np.clip(probs_raw, PROB_EPS, 1.0 - PROB_EPS)
    return probs, cache


def cross_entropy(y_hat, y) -> float:
    """Binary cross-entropy -y log p - (1-y) log (1-p) with clamped p."""
    p = np.clip(np.asarray(y_hat, dtype=np.float64), PROB_EPS, 1.0 - PROB_EPS)
    y = np.asarray(y, dtype=np.float64)
    value = -(y * np.log(p) + (1.0 - y) * np.log(1.0 - p))
    return float(value) if value.ndim == 0 else value


def mean_cross_entropy(probs: np.ndarray, labels: np.ndarray) -> float:
    return float(np.mean(cross_entropy(probs, labels)))


@dataclass
class LayerGrads:
    weights: np.ndarray
    biases: np.ndarray
    gamma: Optional[np.ndarray] = None
    beta: Optional[np.ndarray] = None


def backward(model: MlpModel, cache: ForwardCache, labels: np.ndarray) -> list[LayerGrads]:
    """Exact gradients of the mean cross-entropy for every parameter.

    Requires the cache of a train-mode forward over the same batch; the
    sigmoid+cross-entropy pair collapses to (p - y)/n at the output.
    """
    if cache.mode != "train":
        raise ValueError("backward needs a train-mode forward cache")
    if cache.widths != model.widths() or len(cache.layers) != len(model.layers):
        raise ValueError("cache does not match this model")
    y = np.asarray(labels, dtype=np.float64).reshape(-1)
    if y.shape[0] != cache.batch_size:
        raise ValueError("label count does not match the cached batch")

    n = cache.batch_size
    grads: list[Optional[LayerGrads]] = [None] * len(model.layers)
    # d(mean CE)/dz at the sigmoid output.
    delta = (cache.probs_raw - y)[:, None] / n

    for i in range(len(model.layers) - 1, -1, -1):
        layer = model.layers[i]
        lc = cache.layers[i]
        if i != len(model.layers) - 1:
            dh = delta
            if lc.dropout_mask is not None:
                dh = dh * lc.dropout_mask / (1.0 - layer.dropout_rate)
            if layer.activation == "relu":
                dy = dh * (lc.y > 0.0)
            else:
                dy = dh * lc.h * (1.0 - lc.h)
        else:
            dy = delta  # already includes the sigmoid derivative

        dgamma = dbeta = None
        if layer.batch_norm is not None:
            bn = layer.batch_norm
            xhat, inv_std = lc.bn_xhat, lc.bn_inv_std
            dgamma = np.sum(dy * xhat, axis=0)
            dbeta = np.sum(dy, axis=0)
            dxhat = dy * bn.gamma
            dz = (
                inv_std
                / n
                * (n * dxhat - np.sum(dxhat, axis=0) - xhat * np.sum(dxhat * xhat, axis=0))
            )
        else:
            dz = dy

        grads[i] = LayerGrads(
            weights=dz.T @ lc.x,
            biases=dz.sum(axis=0),
            gamma=dgamma,
            beta=dbeta,
        )
        delta = dz @ layer.weights

    return grads  # type: ignore[return-value]


def sgd_step(model: MlpModel, grads: list[LayerGrads], eta: float) -> MlpModel:
    """Apply p <- p - eta * grad(p) to every parameter, in place."""
    if eta < 0:
        raise ValueError("learning rate must not be negative")
    if len(grads) != len(model.layers):
        raise ValueError("gradient/layer count mismatch")
    if eta == 0.0:
        return model
    for layer, g in zip(model.layers, grads):
        if g.weights.shape != layer.weights.shape or g.biases.shape != layer.biases.shape:
            raise ValueError("gradient shapes do not match the model")
        layer.weights -= eta * g.weights
        layer.biases -= eta * g.biases
        if layer.batch_norm is not None and g.gamma is not None:
            layer.batch_norm.gamma -= eta * g.gamma
            layer.batch_norm.beta -= eta * g.beta
    return model


def predict(model: MlpModel, x: np.ndarray) -> tuple[float, Verdict]:
    """Score one standardized feature vector; malicious iff p >= threshold."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (model.input_width,):
        raise ValueError(f"expected a vector of {model.input_width} values")
    probs, _ = forward(model, x[None, :], mode="infer")
    p = float(probs[0])
    return p, ("malicious" if p >= model.threshold else "benign")
