"""Evaluation metrics: scaled MSE/bias, interval coverage and the weighted F-measure."""
from __future__ import annotations

from itertools import combinations

import numpy as np

from .types import ValidationError


def scaled_errors(estimates, truths, lo=None, hi=None, skip_first: int = 7) -> dict:
    """Relative-error summaries over days after ``skip_first``.

    mse is the mean squared relative error, bias_pct the mean relative error in
    percent, coverage_pct the share of days whose interval contains the truth.
    """
    est = np.asarray(estimates, dtype=float)
    tru = np.asarray(truths, dtype=float)
    if est.shape != tru.shape:
        raise ValidationError("estimates and truths are not aligned")
    sel = slice(skip_first, None)
    est, tru = est[sel], tru[sel]
    if np.any(tru == 0):
        raise ValidationError("zero truth value")
    rel = (est - tru) / tru
    out = {"mse": float(np.mean(rel**2)), "bias_pct": float(100.0 * np.mean(rel)), "n_days": int(tru.size)}
    if lo is not None and hi is not None:
        lo = np.asarray(lo, dtype=float)[sel]
        hi = np.asarray(hi, dtype=float)[sel]
        out["coverage_pct"] = float(100.0 * np.mean((lo <= tru) & (tru <= hi)))
    return out


def pair_confusion(true_labels, est_labels) -> tuple[int, int, int]:
    """(TP, FP, FN) over all unordered pairs of days by co-membership."""
    if len(true_labels) != len(est_labels):
        raise ValidationError("label vectors differ in length")
    tp = fp = fn = 0
    for i, j in combinations(range(len(true_labels)), 2):
        same_true = true_labels[i] == true_labels[j]
        same_est = est_labels[i] == est_labels[j]
        tp += same_true and same_est
        fp += same_est and not same_true
        fn += same_true and not same_est
    return tp, fp, fn


def wfm(true_clusters, est_clusters, b: float = 0.5) -> float:
    """Weighted F-measure (percent) of an estimated day-of-week clustering.

    With b < 1, wrongly merging days (a false co-membership) costs more than
    wrongly splitting them.
    """
    tp, fp, fn = pair_confusion(list(true_clusters), list(est_clusters))
    precision = tp / (tp + fp) if tp + fp else 1.0
    recall = tp / (tp + fn) if tp + fn else 1.0
    if precision == 0 and recall == 0:
        return 0.0
    return 100.0 * (b * b + 1) * precision * recall / (b * b * precision + recall)
