"""Evaluation metrics: ranking AUC, accuracy, and support-recovery F1."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DataError


def auc(scores, labels) -> float:
    """Area under the ROC curve via the rank-sum estimator.

    Equals the fraction of (positive, negative) pairs ranked correctly,
    with ties earning half credit.  Needs at least one label of each class.
    """
    scores = np.asarray(scores, dtype=np.float64).ravel()
    labels = np.asarray(labels, dtype=np.float64).ravel()
    if scores.shape != labels.shape:
        raise DataError("scores and labels must have equal length")
    if not np.all(np.abs(labels) == 1.0):
        raise DataError("labels must be -1 or +1")
    pos = labels > 0
    n_pos = int(pos.sum())
    n_neg = labels.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise DataError("AUC needs at least one positive and one negative label")
    order = np.argsort(scores, kind="mergesort")
    sorted_scores = scores[order]
    # Average ranks within tied groups (1-based).
    boundaries = np.flatnonzero(np.diff(sorted_scores)) + 1
    starts = np.concatenate(([0], boundaries))
    ends = np.concatenate((boundaries, [scores.size]))
    group_rank = (starts + ends + 1) / 2.0
    ranks = np.empty(scores.size)
    ranks[order] = np.repeat(group_rank, ends - starts)
    rank_sum = float(ranks[pos].sum())
    return (rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


def accuracy(scores, labels, threshold: float = 0.0) -> float:
    """Fraction of correct sign predictions; a score exactly at the
    threshold predicts +1."""
    scores = np.asarray(scores, dtype=np.float64).ravel()
    labels = np.asarray(labels, dtype=np.float64).ravel()
    if scores.shape != labels.shape:
        raise DataError("scores and labels must have equal length")
    if scores.size == 0:
        return 0.0
    predicted = np.where(scores - threshold >= 0.0, 1.0, -1.0)
    return float(np.mean(predicted == labels))


@dataclass(frozen=True)
class SupportComparison:
    """Precision/recall/F1 of an estimated support against a known one."""

    estimated: frozenset
    truth: frozenset
    precision: float
    recall: float
    f1: float

    @classmethod
    def compare(cls, estimated, truth) -> "SupportComparison":
        est = frozenset(estimated)
        tru = frozenset(truth)
        if not tru:
            raise DataError("true support must not be empty")
        hits = len(est & tru)
        precision = hits / len(est) if est else 0.0
        recall = hits / len(tru)
        f1 = 0.0 if hits == 0 else 2.0 * precision * recall / (precision + recall)
        return cls(est, tru, precision, recall, f1)


def recovery_f1(estimated, truth) -> float:
    """Harmonic mean of support precision and recall; 0 when nothing is
    recovered (including an empty estimate)."""
    return SupportComparison.compare(estimated, truth).f1
