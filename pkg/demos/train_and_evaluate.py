"""
Training and evaluating the detector on a synthetic corpus
==========================================================

Feeds the full library pipeline without touching the CLI: build a
labeled feature set, train the 48-72-72-1 network with the stock
hyperparameters (scaled-down epoch count), then sweep thresholds and
print the operating points a deployment would choose from.

Run:  python demos/train_and_evaluate.py
"""

import numpy as np

from pdfmlp import Dataset, TrainConfig, evaluate, pick_threshold, train
from pdfmlp.features import N_FEATURES
from pdfmlp.preprocess import split_train_validation

# -- a desk-scale stand-in corpus -------------------------------------------
#
# Real corpora come from `pdfmlp extract`; here we synthesize feature rows
# directly: benign documents cluster near zero on the risk features while
# malicious ones push keyword counts, entropy and decode failures upward.

rng = np.random.default_rng(42)
n_benign, n_malicious = 3000, 500  # roughly the 6:1 ratio seen in the wild

benign = np.abs(rng.normal(0.0, 0.6, size=(n_benign, N_FEATURES)))
malicious = np.abs(rng.normal(0.0, 0.6, size=(n_malicious, N_FEATURES)))
risky = rng.choice(N_FEATURES, size=10, replace=False)
malicious[:, risky] += rng.uniform(1.0, 3.0, size=(n_malicious, len(risky)))

dataset = Dataset(
    features=np.vstack([benign, malicious]),
    labels=np.array([0] * n_benign + [1] * n_malicious),
    paths=[f"mem://{i}" for i in range(n_benign + n_malicious)],
)

# -- train --------------------------------------------------------------------

config = TrainConfig(epochs=60, batch_size=64, eta=0.01, dropout_rate=0.15,
                     validation_fraction=0.20, seed=7)
print(f"training on {len(dataset)} rows "
      f"({n_benign} benign / {n_malicious} malicious), {config.epochs} epochs ...")
model, scaler, report = train(dataset, config)

best = report.records[report.selected_epoch]
print(f"selected epoch {report.selected_epoch}: "
      f"train_loss={best.train_loss:.4f} val_loss={best.val_loss:.4f} "
      f"val_tpr={best.val_tpr:.3f} val_fpr={best.val_fpr:.4f}")

# -- evaluate on the held-out validation rows ------------------------------------

_, holdout = split_train_validation(dataset, config.validation_fraction, config.seed)
result = evaluate(model, scaler, holdout)
print(f"\nholdout: {result.n_benign} benign, {result.n_malicious} malicious, "
      f"AUC {result.auc:.4f}")

op = result.operating_point
print(f"stock threshold {op.threshold:.2f}: tpr={op.tpr:.3f} fpr={op.fpr:.4f} fnr={op.fnr:.3f}")

print("\nthreshold  tpr     fpr      fnr")
for point in result.sweep[:: max(1, len(result.sweep) // 12)]:
    print(f"{point.threshold:9.4f}  {point.tpr:.3f}  {point.fpr:.5f}  {point.fnr:.3f}")

for bound in (0.05, 0.01):
    chosen = pick_threshold(result, max_fpr=bound)
    point = next(p for p in result.sweep if p.threshold == chosen)
    print(f"\nbest threshold with FPR <= {bound}: {chosen:.4f} "
          f"(tpr={point.tpr:.3f}, fpr={point.fpr:.5f})")
