"""
Classification metrics. A metric whose denominator is zero is undefined and
comes back as None; it is never reported as 0.
"""
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from fraudlab.core import DataError

UNDEFINED = "undefined"

Metric = Optional[float]


def _ratio(numerator: int, denominator: int) -> Metric:
    return numerator / denominator if denominator > 0 else None


def metric_value(value: Metric) -> Union[float, str]:
    """A metric as it is written to reports."""
    return UNDEFINED if value is None else value


def _check_inputs(scores, labels) -> Tuple[np.ndarray, np.ndarray]:
    scores = np.asarray(scores, dtype=np.float64).reshape(-1)
    labels = np.asarray(labels).reshape(-1)
    if len(scores) != len(labels):
        raise DataError(f"{len(scores)} scores for {len(labels)} labels")
    if len(scores) == 0:
        raise DataError("metrics need at least one scored record")
    if not np.isin(labels, (0, 1)).all():
        raise DataError("labels must be 0 or 1")
    if not np.isfinite(scores).all():
        raise DataError("scores hold NaN or infinite values")
    return scores, labels.astype(np.int64)


@dataclass(frozen=True)
class ConfusionMetrics:
    """Confusion counts at one threshold and the metrics derived from them."""

    tp: int
    fp: int
    tn: int
    fn: int
    threshold: float

    @property
    def n(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    @property
    def precision(self) -> Metric:
        return _ratio(self.tp, self.tp + self.fp)

    @property
    def recall(self) -> Metric:
        return _ratio(self.tp, self.tp + self.fn)

    @property
    def f1(self) -> Metric:
        """Harmonic mean of precision and recall; undefined unless both are."""
        if self.precision is None or self.recall is None:
            return None
        return _ratio(2 * self.tp, 2 * self.tp + self.fp + self.fn)

    @property
    def accuracy(self) -> Metric:
        return _ratio(self.tp + self.tn, self.n)

    def as_dict(self) -> Dict:
        return {
            "threshold": self.threshold,
            "tp": self.tp,
            "fp": self.fp,
            "tn": self.tn,
            "fn": self.fn,
            "precision": metric_value(self.precision),
            "recall": metric_value(self.recall),
            "f1": metric_value(self.f1),
            "accuracy": metric_value(self.accuracy),
        }


def confusion_metrics(scores: Sequence[float], labels: Sequence[int], threshold: float = 0.5) -> ConfusionMetrics:
    """
    Precision, recall, F1 and accuracy of predicting positive when
    ``score >= threshold``.

    Raises:
        DataError: length mismatch or no records
    """
    scores, labels = _check_inputs(scores, labels)
    predicted = scores >= threshold
    positive = labels == 1
    return ConfusionMetrics(
        tp=int(np.sum(predicted & positive)),
        fp=int(np.sum(predicted & ~positive)),
        tn=int(np.sum(~predicted & ~positive)),
        fn=int(np.sum(~predicted & positive)),
        threshold=threshold,
    )


def auc(scores: Sequence[float], labels: Sequence[int]) -> float:
    """
    Area under the ROC curve as the rank statistic: the probability that a
    random positive scores above a random negative, ties counting one half.

    Raises:
        DataError: length mismatch or a single class
    """
    scores, labels = _check_inputs(scores, labels)
    n_pos = int(labels.sum())
    n_neg = len(labels) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise DataError("AUC needs both classes")
    _, inverse, counts = np.unique(scores, return_inverse=True, return_counts=True)
    # tied scores share the mean of the 1-based ranks they span
    first_rank = np.cumsum(counts) - counts + 1
    mean_rank = first_rank + (counts - 1) / 2.0
    rank_sum = float(mean_rank[inverse.reshape(-1)][labels == 1].sum())
    return (rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


@dataclass(frozen=True)
class PRCurve:
    """
    Precision and recall at every distinct score, thresholds descending.
    """

    thresholds: List[float]
    precision: List[float]
    recall: List[float]

    @property
    def average_precision(self) -> float:
        """Sum of precision weighted by the recall gained at each threshold."""
        total = 0.0
        previous = 0.0
        for p, r in zip(self.precision, self.recall):
            total += (r - previous) * p
            previous = r
        return total

    def as_dict(self) -> Dict:
        return {
            "thresholds": self.thresholds,
            "precision": self.precision,
            "recall": self.recall,
            "average_precision": self.average_precision,
        }


def pr_curve(scores: Sequence[float], labels: Sequence[int]) -> PRCurve:
    """
    Raises:
        DataError: length mismatch or no positive record
    """
    scores, labels = _check_inputs(scores, labels)
    n_pos = int(labels.sum())
    if n_pos == 0:
        raise DataError("a precision-recall curve needs positive records")
    uniques, inverse = np.unique(scores, return_inverse=True)
    inverse = inverse.reshape(-1)
    pos_at = np.bincount(inverse, weights=labels, minlength=len(uniques))[::-1]
    all_at = np.bincount(inverse, minlength=len(uniques))[::-1]
    tp = np.cumsum(pos_at)
    predicted = np.cumsum(all_at)
    return PRCurve(
        thresholds=[float(t) for t in uniques[::-1]],
        precision=[float(v) for v in tp / predicted],
        recall=[float(v) for v in tp / n_pos],
    )
