"""Central finite-difference gradient oracle shared by the MLP tests."""

from __future__ import annotations

from typing import Iterator, Optional

import numpy as np

from pdfmlp.mlp import MlpModel, forward, mean_cross_entropy


def param_arrays(model: MlpModel) -> Iterator[np.ndarray]:
    for layer in model.layers:
        yield layer.weights
        yield layer.biases
        if layer.batch_norm is not None:
            yield layer.batch_norm.gamma
            yield layer.batch_norm.beta


def grad_arrays(grads) -> Iterator[np.ndarray]:
    for g in grads:
        yield g.weights
        yield g.biases
        if g.gamma is not None:
            yield g.gamma
            yield g.beta


def train_mode_loss(model: MlpModel, X: np.ndarray, y: np.ndarray) -> float:
    probs, _ = forward(model, X, mode="train")
    return mean_cross_entropy(probs, y)


def max_relative_error(
    model: MlpModel,
    X: np.ndarray,
    y: np.ndarray,
    analytic,
    h: float = 1e-5,
    sample_per_array: Optional[int] = None,
    seed: int = 0,
) -> float:
    """Compare analytic gradients against (L(p+h) - L(p-h)) / 2h.

    With sample_per_array set, only that many deterministic entries of each
    parameter array are probed; otherwise every parameter is.  The relative
    error denominator has a small floor so finite-difference noise on
    near-zero gradients is not amplified.
    """
    pick = np.random.default_rng(seed)
    worst = 0.0
    for p, g in zip(param_arrays(model), grad_arrays(analytic)):
        flat_p = p.reshape(-1)
        flat_g = g.reshape(-1)
        if sample_per_array is not None and flat_p.size > sample_per_array:
            idx = pick.choice(flat_p.size, size=sample_per_array, replace=False)
        else:
            idx = np.arange(flat_p.size)
        for i in idx:
            keep = flat_p[i]
            flat_p[i] = keep + h
            hi = train_mode_loss(model, X, y)
            flat_p[i] = keep - h
            lo = train_mode_loss(model, X, y)
            flat_p[i] = keep
            fd = (hi - lo) / (2.0 * h)
            err = abs(flat_g[i] - fd) / max(abs(flat_g[i]), abs(fd), 1e-6)
            worst = max(worst, err)
    return worst


def min_relu_margin(model: MlpModel, X: np.ndarray) -> float:
    """Smallest |pre-activation| over all ReLU units; tiny values would put
    finite differences astride the kink."""
    probs, cache = forward(model, X, mode="train")
    margin = np.inf
    for layer, lc in zip(model.layers, cache.layers):
        if layer.activation == "relu":
            margin = min(margin, float(np.min(np.abs(lc.y))))
    return margin
