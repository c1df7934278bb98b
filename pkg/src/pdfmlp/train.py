"""Mini-batch SGD training loop with validation-based model selection.

Each epoch reshuffles the training rows from a per-epoch seed, walks
mini-batches (the last one may be short), and runs forward/backward/step.
After every epoch the validation loss is measured in infer mode; the
parameter snapshot with the lowest validation loss is what the caller
gets back, which doubles as the overfitting guard.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .mlp import MlpModel, backward, build_model, forward, mean_cross_entropy, sgd_step
from .preprocess import Dataset, Scaler, fit_scaler, split_train_validation
from .store import dataset_checksum, model_checksum

__all__ = ["TrainConfig", "TrainReport", "EpochRecord", "TrainingDivergedError", "train", "resume"]


class TrainingDivergedError(RuntimeError):
    pass


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 5000
    batch_size: int = 64
    eta: float = 0.01
    dropout_rate: float = 0.15
    validation_fraction: float = 0.20
    seed: int = 0
    early_stop_loss: Optional[float] = None

    def __post_init__(self) -> None:
        if self.batch_size < 1:
            raise ValueError("batch_size must be at least 1")
        if not 0.0 < self.validation_fraction < 1.0:
            raise ValueError("validation_fraction must be in (0, 1)")
        if self.eta <= 0:
            raise ValueError("eta must be positive")
        if not 0.0 <= self.dropout_rate < 1.0:
            raise ValueError("dropout_rate must be in [0, 1)")


@dataclass(frozen=True)
class EpochRecord:
    epoch: int
    train_loss: float
    val_loss: float
    val_tpr: float
    val_fpr: float


@dataclass
class TrainReport:
    records: list[EpochRecord] = field(default_factory=list)
    selected_epoch: int = -1
    final_model_checksum: str = ""

    def write_csv(self, path: str) -> None:
        with open(path, "w", newline="") as fh:
            fh.write("epoch,train_loss,val_loss,val_tpr,val_fpr\n")
            for r in self.records:
                fh.write(
                    f"{r.epoch},{r.train_loss:.9g},{r.val_loss:.9g},"
                    f"{r.val_tpr:.9g},{r.val_fpr:.9g}\n"
                )


def _rng(seed: int, *stream: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=stream))


def _rates_at_half(probs: np.ndarray, labels: np.ndarray) -> tuple[float, float]:
    pos = labels == 1
    neg = labels == 0
    tpr = float(np.sum(probs[pos] >= 0.5) / pos.sum()) if pos.any() else 0.0
    fpr = float(np.sum(probs[neg] >= 0.5) / neg.sum()) if neg.any() else 0.0
    return tpr, fpr


def train(
    train_set: Dataset,
    config: TrainConfig,
    *,
    hidden_widths: Sequence[int] = (72, 72),
    batch_norm: bool = True,
    threshold: float = 0.62,
) -> tuple[MlpModel, Scaler, TrainReport]:
    """Fit a fresh network on ``train_set``.

    Splits off the validation part first, fits the feature scaler on the
    remaining training rows only, then runs the SGD loop.  Training stops
    after ``config.epochs`` epochs or as soon as the validation loss drops
    below ``config.early_stop_loss`` when one is set.
    """
    if config.epochs < 1:
        raise ValueError("no training performed: epochs must be at least 1")
    _require_both_classes(train_set)

    fit_part, val_part = split_train_validation(
        train_set, config.validation_fraction, config.seed
    )
    scaler = fit_scaler(fit_part)
    model = build_model(
        input_width=train_set.features.shape[1],
        hidden_widths=hidden_widths,
        dropout_rate=config.dropout_rate,
        batch_norm=batch_norm,
        threshold=threshold,
        rng=_rng(config.seed, 0),
    )
    report = _sgd_loop(model, scaler, fit_part, val_part, config)
    best = report.pop("best_model")
    out = TrainReport(
        records=report["records"],
        selected_epoch=report["selected_epoch"],
        final_model_checksum=model_checksum(
            best, scaler, _fingerprint(train_set, config)
        ),
    )
    return best, scaler, out


def resume(
    model: MlpModel,
    train_set: Dataset,
    config: TrainConfig,
    *,
    scaler: Optional[Scaler] = None,
) -> tuple[MlpModel, TrainReport]:
    """Continue SGD from existing parameters.

    The shuffle stream restarts from ``config.seed``, so train(a) followed
    by resume(b) is deterministic but not the same trajectory as
    train(a+b).  With ``epochs=0`` the model is returned unchanged.
    """
    if model.input_width != train_set.features.shape[1]:
        raise ValueError(
            f"model expects {model.input_width} features, "
            f"dataset has {train_set.features.shape[1]}"
        )
    if scaler is not None and scaler.schema_id != train_set.schema_id:
        raise ValueError(
            f"scaler mismatch: scaler is {scaler.schema_id!r}, "
            f"dataset is {train_set.schema_id!r}"
        )
    if config.epochs == 0:
        return model, TrainReport()
    _require_both_classes(train_set)

    fit_part, val_part = split_train_validation(
        train_set, config.validation_fraction, config.seed
    )
    if scaler is None:
        scaler = fit_scaler(fit_part)
    report = _sgd_loop(model, scaler, fit_part, val_part, config)
    best = report.pop("best_model")
    out = TrainReport(
        records=report["records"],
        selected_epoch=report["selected_epoch"],
        final_model_checksum=model_checksum(best, scaler, _fingerprint(train_set, config)),
    )
    return best, out


def _require_both_classes(dataset: Dataset) -> None:
    if np.any((dataset.labels != 0) & (dataset.labels != 1)):
        raise ValueError("training labels must be 0 or 1")
    n_benign, n_malicious = dataset.class_counts()
    if n_benign == 0 or n_malicious == 0:
        raise ValueError("training needs both classes present")


def _fingerprint(dataset: Dataset, config: TrainConfig) -> dict:
    return {
        "seed": config.seed,
        "epochs": config.epochs,
        "eta": config.eta,
        "data_checksum": dataset_checksum(dataset),
    }


def _sgd_loop(
    model: MlpModel,
    scaler: Scaler,
    fit_part: Dataset,
    val_part: Dataset,
    config: TrainConfig,
) -> dict:
    X = scaler.transform_matrix(fit_part.features)
    y = fit_part.labels.astype(np.float64)
    X_val = scaler.transform_matrix(val_part.features)
    y_val = val_part.labels

    n = X.shape[0]
    records: list[EpochRecord] = []
    best_loss = np.inf
    best_model = model.copy()
    selected = -1

    for epoch in range(config.epochs):
        shuffle = _rng(config.seed, 1, epoch)
        dropout_rng = _rng(config.seed, 2, epoch)
        order = shuffle.permutation(n)
        loss_sum = 0.0
        for start in range(0, n, config.batch_size):
            idx = order[start : start + config.batch_size]
            probs, cache = forward(model, X[idx], mode="train", rng=dropout_rng)
            loss_sum += mean_cross_entropy(probs, y[idx]) * idx.shape[0]
            grads = backward(model, cache, y[idx])
            sgd_step(model, grads, config.eta)
        train_loss = loss_sum / n

        val_probs, _ = forward(model, X_val, mode="infer")
        val_loss = mean_cross_entropy(val_probs, y_val.astype(np.float64))
        tpr, fpr = _rates_at_half(val_probs, y_val)
        records.append(EpochRecord(epoch, train_loss, val_loss, tpr, fpr))

        if not (np.isfinite(train_loss) and np.isfinite(val_loss)):
            raise TrainingDivergedError(f"non-finite loss at epoch {epoch}")
        if val_loss < best_loss:
            best_loss = val_loss
            best_model = model.copy()
            selected = epoch
        if config.early_stop_loss is not None and val_loss < config.early_stop_loss:
            break

    return {"records": records, "selected_epoch": selected, "best_model": best_model}
