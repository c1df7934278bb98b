"""Evaluation: hand-enumerated confusion counts, exact AUC, threshold picking."""

import math

import numpy as np
import pytest

from pdfmlp import Dataset, evaluate, pick_threshold
from pdfmlp.evaluate import ThresholdNotReachable, score_dataset, write_report_files
from pdfmlp.features import N_FEATURES
from pdfmlp.mlp import DenseLayer, MlpModel
from pdfmlp.preprocess import Scaler


def passthrough_model(threshold: float = 0.5) -> MlpModel:
    """sigmoid(feature 0): lets a test dictate scores via logits."""
    weights = np.zeros((1, N_FEATURES))
    weights[0, 0] = 1.0
    return MlpModel(
        layers=[DenseLayer(weights=weights, biases=np.zeros(1), activation="sigmoid")],
        threshold=threshold,
    )


def identity_scaler() -> Scaler:
    return Scaler(means=np.zeros(N_FEATURES), stds=np.ones(N_FEATURES))


def dataset_with_scores(mal_scores, ben_scores) -> Dataset:
    scores = list(mal_scores) + list(ben_scores)
    labels = [1] * len(mal_scores) + [0] * len(ben_scores)
    X = np.zeros((len(scores), N_FEATURES))
    X[:, 0] = [math.log(s / (1.0 - s)) for s in scores]  # logits
    return Dataset(features=X, labels=np.array(labels), paths=[str(i) for i in range(len(scores))])


def brute_force_auc(mal_scores, ben_scores) -> float:
    wins = 0.0
    for m in mal_scores:
        for b in ben_scores:
            if m > b:
                wins += 1.0
            elif m == b:
                wins += 0.5
    return wins / (len(mal_scores) * len(ben_scores))


def test_perfect_scorer():
    d = dataset_with_scores([0.99] * 5, [0.01] * 7)
    report = evaluate(passthrough_model(0.5), identity_scaler(), d, thresholds=[0.5])
    point = report.sweep[0]
    assert point.tpr == 1.0
    assert point.fpr == 0.0
    assert report.auc == 1.0
    assert report.n_malicious == 5
    assert report.n_benign == 7


def test_constant_scorer_gives_diagonal_roc():
    d = dataset_with_scores([0.5] * 10, [0.5] * 10)
    report = evaluate(passthrough_model(), identity_scaler(), d)
    assert report.auc == pytest.approx(0.5, abs=1e-15)
    assert (0.0, 0.0) in report.roc_points and (1.0, 1.0) in report.roc_points


def test_hand_enumerated_confusion_counts():
    # mal: 0.9, 0.8, 0.3; ben: 0.7, 0.2, 0.1 at threshold 0.75:
    # TP = {0.9, 0.8}, FN = {0.3}, FP = {}, TN = all benign
    d = dataset_with_scores([0.9, 0.8, 0.3], [0.7, 0.2, 0.1])
    report = evaluate(passthrough_model(), identity_scaler(), d, thresholds=[0.75])
    point = report.sweep[0]
    assert point.tpr == pytest.approx(2.0 / 3.0, abs=1e-15)
    assert point.fpr == 0.0
    assert point.fnr == pytest.approx(1.0 / 3.0, abs=1e-15)


def test_auc_equals_pairwise_probability_with_ties():
    rng = np.random.default_rng(0)
    mal = list(np.round(rng.uniform(0.2, 0.95, 300), 2))  # rounding forces ties
    ben = list(np.round(rng.uniform(0.05, 0.8, 400), 2))
    d = dataset_with_scores(mal, ben)
    model, scaler = passthrough_model(), identity_scaler()
    report = evaluate(model, scaler, d)
    scores = score_dataset(model, scaler, d)
    auc_oracle = brute_force_auc(scores[d.labels == 1], scores[d.labels == 0])
    assert abs(report.auc - auc_oracle) <= 1e-12


def test_rates_identities_and_monotonicity():
    rng = np.random.default_rng(3)
    d = dataset_with_scores(rng.uniform(0.3, 0.99, 150), rng.uniform(0.01, 0.7, 300))
    report = evaluate(passthrough_model(), identity_scaler(), d)
    previous_fpr, previous_fnr = 1.1, -0.1
    for point in report.sweep:  # sweep is sorted ascending by threshold
        assert point.tpr + point.fnr == 1.0
        assert point.fpr <= previous_fpr  # FPR never increases with threshold
        assert point.fnr >= previous_fnr  # FNR never decreases
        previous_fpr, previous_fnr = point.fpr, point.fnr
    fprs = [p[0] for p in report.roc_points]
    tprs = [p[1] for p in report.roc_points]
    assert fprs == sorted(fprs)
    assert tprs == sorted(tprs)
    assert 0.0 <= report.auc <= 1.0


def test_row_permutation_changes_nothing():
    rng = np.random.default_rng(9)
    mal = rng.uniform(0.4, 0.99, 80)
    ben = rng.uniform(0.01, 0.6, 200)
    d = dataset_with_scores(mal, ben)
    order = rng.permutation(len(d))
    shuffled = d.subset(order)
    a = evaluate(passthrough_model(), identity_scaler(), d)
    b = evaluate(passthrough_model(), identity_scaler(), shuffled)
    assert a.sweep == b.sweep
    assert a.roc_points == b.roc_points
    assert a.auc == b.auc


def test_single_class_rejected():
    d = dataset_with_scores([0.9, 0.8], [])
    with pytest.raises(ValueError, match="rates undefined"):
        evaluate(passthrough_model(), identity_scaler(), d)


def test_empty_thresholds_rejected():
    d = dataset_with_scores([0.9], [0.1])
    with pytest.raises(ValueError, match="nonempty"):
        evaluate(passthrough_model(), identity_scaler(), d, thresholds=[])


def test_operating_point_uses_model_threshold():
    d = dataset_with_scores([0.9, 0.63, 0.3], [0.61, 0.2])
    report = evaluate(passthrough_model(0.62), identity_scaler(), d)
    op = report.operating_point
    assert op.threshold == 0.62
    assert op.tpr == pytest.approx(2.0 / 3.0)
    assert op.fpr == 0.0


# -- pick_threshold ------------------------------------------------------------


def test_pick_threshold_perfect_scorer():
    d = dataset_with_scores([0.99] * 10, [0.01] * 10)
    grid = [round(0.1 * k, 2) for k in range(1, 10)]  # 0.1 .. 0.9
    report = evaluate(passthrough_model(), identity_scaler(), d, thresholds=grid)
    assert pick_threshold(report, max_fpr=0.001) == 0.9


def test_pick_threshold_constant_scorer_degenerate_bound():
    d = dataset_with_scores([0.5] * 6, [0.5] * 6)
    report = evaluate(passthrough_model(), identity_scaler(), d, thresholds=[0.4, 0.6])
    # above 0.5 nothing is flagged: TPR 0, FPR 0 still satisfies the bound
    assert pick_threshold(report, max_fpr=0.0) == 0.6


def test_pick_threshold_unreachable_reports_floor():
    d = dataset_with_scores([0.9], [0.9, 0.2])
    report = evaluate(passthrough_model(), identity_scaler(), d, thresholds=[0.1])
    with pytest.raises(ThresholdNotReachable, match="minimum achievable"):
        pick_threshold(report, max_fpr=0.01)


def _phi(x: float) -> float:
    return 0.5 * (1.0 + math.erf(x / math.sqrt(2.0)))


def _phi_inv(p: float) -> float:
    lo, hi = -10.0, 10.0
    for _ in range(80):
        mid = (lo + hi) / 2.0
        if _phi(mid) < p:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2.0


def test_small_fpr_relaxation_buys_large_tpr():
    # Two-Gaussian score model tuned to AUC ~ 0.99; the numerically
    # integrated oracle says what TPR each FPR bound should buy.
    mu = 3.3
    rng = np.random.default_rng(2718)
    ben_logit = rng.normal(0.0, 1.0, 20000)
    mal_logit = rng.normal(mu, 1.0, 2000)
    to_score = lambda z: 1.0 / (1.0 + np.exp(-z))
    d = dataset_with_scores(to_score(mal_logit), to_score(ben_logit))
    report = evaluate(passthrough_model(), identity_scaler(), d)
    assert report.auc == pytest.approx(_phi(mu / math.sqrt(2.0)), abs=0.01)

    def tpr_at(max_fpr):
        threshold = pick_threshold(report, max_fpr)
        return next(p.tpr for p in report.sweep if p.threshold == threshold)

    expected_tight = _phi(mu - _phi_inv(1.0 - 1e-3))  # ~0.58
    expected_loose = _phi(mu - _phi_inv(1.0 - 1e-2))  # ~0.83
    assert tpr_at(1e-3) == pytest.approx(expected_tight, abs=0.05)
    assert tpr_at(1e-2) == pytest.approx(expected_loose, abs=0.05)
    assert tpr_at(1e-2) - tpr_at(1e-3) > 0.15


def test_report_files(tmp_path):
    d = dataset_with_scores([0.9, 0.7], [0.3, 0.1])
    report = evaluate(passthrough_model(), identity_scaler(), d)
    write_report_files(report, str(tmp_path))
    roc = (tmp_path / "roc.csv").read_text().splitlines()
    sweep = (tmp_path / "sweep.csv").read_text().splitlines()
    text = (tmp_path / "report.txt").read_text()
    assert roc[0] == "fpr,tpr"
    assert sweep[0] == "threshold,tpr,fpr,fnr"
    assert "auc:" in text and "operating point:" in text
    assert len(roc) == len(report.roc_points) + 1
