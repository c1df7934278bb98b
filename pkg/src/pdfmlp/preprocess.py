"""Dataset assembly, per-feature standardization and the train/validation split."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .features import N_FEATURES, SCHEMA_ID, FeatureVector

__all__ = [
    "Dataset",
    "Scaler",
    "fit_scaler",
    "transform",
    "split_train_validation",
    "read_features_csv",
    "write_features_csv",
    "CSV_HEADER",
]

CSV_HEADER = ["path", "label"] + [f"f{i:02d}" for i in range(N_FEATURES)]


@dataclass
class Dataset:
    """A feature matrix with labels and source-path provenance."""

    features: np.ndarray  # (n, 48) float64
    labels: np.ndarray  # (n,) int, 0 benign / 1 malicious / -1 unlabeled
    paths: list[str]
    schema_id: str = SCHEMA_ID

    def __post_init__(self) -> None:
        self.features = np.asarray(self.features, dtype=np.float64)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if self.features.ndim != 2 or self.features.shape[1] != N_FEATURES:
            raise ValueError(f"feature matrix must be (n, {N_FEATURES})")
        n = self.features.shape[0]
        if self.labels.shape != (n,) or len(self.paths) != n:
            raise ValueError("row, label and path counts must agree")

    def __len__(self) -> int:
        return self.features.shape[0]

    def subset(self, indices: np.ndarray) -> "Dataset":
        return Dataset(
            features=self.features[indices],
            labels=self.labels[indices],
            paths=[self.paths[i] for i in indices],
            schema_id=self.schema_id,
        )

    def class_counts(self) -> tuple[int, int]:
        return int(np.sum(self.labels == 0)), int(np.sum(self.labels == 1))


@dataclass
class Scaler:
    """Per-feature mean/std fitted on training data.

    A constant feature gets std 1 so its transform is identically zero
    instead of dividing by zero.
    """

    means: np.ndarray
    stds: np.ndarray
    schema_id: str = SCHEMA_ID

    def __post_init__(self) -> None:
        self.means = np.asarray(self.means, dtype=np.float64)
        self.stds = np.asarray(self.stds, dtype=np.float64)
        if self.means.shape != self.stds.shape or self.means.ndim != 1:
            raise ValueError("means and stds must be equal-length vectors")
        if np.any(self.stds <= 0):
            raise ValueError("stds must be positive")

    def transform_matrix(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.shape[-1] != self.means.shape[0]:
            raise ValueError(
                f"expected {self.means.shape[0]} features, got {X.shape[-1]}"
            )
        return (X - self.means) / self.stds


def fit_scaler(train: Dataset) -> Scaler:
    """Fit per-column mean and population standard deviation."""
    if len(train) == 0:
        raise ValueError("empty training set")
    means = train.features.mean(axis=0)
    stds = train.features.std(axis=0)  # population: divide by n
    stds = np.where(stds == 0.0, 1.0, stds)
    return Scaler(means=means, stds=stds, schema_id=train.schema_id)


def transform(scaler: Scaler, x: Union[FeatureVector, np.ndarray]) -> np.ndarray:
    """Standardize one feature vector: (x - mean) / std per column."""
    if isinstance(x, FeatureVector):
        if x.schema_id != scaler.schema_id:
            raise ValueError(
                f"schema mismatch: vector is {x.schema_id!r}, scaler is {scaler.schema_id!r}"
            )
        x = x.values
    return scaler.transform_matrix(np.asarray(x, dtype=np.float64))


def split_train_validation(
    d: Dataset, fraction: float, seed: int
) -> tuple[Dataset, Dataset]:
    """Deterministic stratified split; the second part gets round(fraction*n) rows.

    Per-class validation counts are apportioned by largest remainder, so
    both parts keep the full set's class ratio to within one sample per
    class.
    """
    if not 0.0 < fraction < 1.0:
        raise ValueError("fraction must be in (0, 1)")
    n = len(d)
    classes = sorted(set(int(v) for v in d.labels))
    for c in classes:
        if int(np.sum(d.labels == c)) < 2:
            raise ValueError(f"cannot stratify: class {c} has fewer than 2 samples")

    n_val = int(math.floor(fraction * n + 0.5))
    n_val = min(max(n_val, 0), n)

    # Largest-remainder apportionment of n_val across classes.
    quotas = []
    for c in classes:
        exact = n_val * int(np.sum(d.labels == c)) / n
        quotas.append([c, int(math.floor(exact)), exact - math.floor(exact)])
    short = n_val - sum(q[1] for q in quotas)
    for q in sorted(quotas, key=lambda q: (-q[2], q[0]))[:short]:
        q[1] += 1

    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed))
    val_idx: list[np.ndarray] = []
    train_idx: list[np.ndarray] = []
    for c, take, _ in quotas:
        members = np.flatnonzero(d.labels == c)
        order = rng.permutation(len(members))
        members = members[order]
        val_idx.append(members[:take])
        train_idx.append(members[take:])
    val = np.concatenate(val_idx) if val_idx else np.empty(0, dtype=np.int64)
    train = np.concatenate(train_idx) if train_idx else np.empty(0, dtype=np.int64)
    return d.subset(train), d.subset(val)


def write_features_csv(path: str, dataset: Dataset) -> None:
    """Write the feature-matrix CSV: header then one row per document.

    Values carry up to 9 significant digits; rows are written in dataset
    order (callers wanting deterministic files sort by path first).
    """
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for i in range(len(dataset)):
            row = [dataset.paths[i], str(int(dataset.labels[i]))]
            row += [_format_value(v) for v in dataset.features[i]]
            writer.writerow(row)


def _format_value(v: float) -> str:
    return format(float(v), ".9g")


def read_features_csv(path: str) -> Dataset:
    """Read a feature-matrix CSV produced by write_features_csv."""
    paths: list[str] = []
    labels: list[int] = []
    rows: list[list[float]] = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != CSV_HEADER:
            raise ValueError(f"{path}: unexpected header; not a feature CSV")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(CSV_HEADER):
                raise ValueError(f"{path}:{lineno}: expected {len(CSV_HEADER)} fields")
            paths.append(row[0])
            label = int(row[1])
            if label not in (-1, 0, 1):
                raise ValueError(f"{path}:{lineno}: label must be -1, 0 or 1")
            labels.append(label)
            rows.append([float(v) for v in row[2:]])
    features = (
        np.asarray(rows, dtype=np.float64)
        if rows
        else np.empty((0, N_FEATURES), dtype=np.float64)
    )
    return Dataset(features=features, labels=np.asarray(labels, dtype=np.int64), paths=paths)
