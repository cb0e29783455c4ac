import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fraudlab.core import DataError
from fraudlab.evaluation import UNDEFINED, ConfusionMetrics, auc, confusion_metrics, pr_curve


def test_confusion_metrics():
    m = confusion_metrics([0.9, 0.8, 0.3], [1, 0, 1])
    assert (m.tp, m.fp, m.tn, m.fn) == (1, 1, 0, 1)
    assert m.precision == 0.5
    assert m.recall == 0.5
    assert m.f1 == 0.5
    assert m.accuracy == pytest.approx(1 / 3)
    assert m.n == 3


def test_threshold_is_inclusive():
    assert confusion_metrics([0.5, 0.49], [1, 0]).tp == 1
    assert confusion_metrics([0.5, 0.49], [1, 0], threshold=0.6).fn == 1


def test_undefined_metrics():
    no_predicted = confusion_metrics([0.1, 0.2], [1, 0])
    assert no_predicted.precision is None
    assert no_predicted.recall == 0.0
    assert no_predicted.f1 is None
    doc = no_predicted.as_dict()
    assert doc["precision"] == UNDEFINED
    assert doc["f1"] == UNDEFINED
    assert doc["recall"] == 0.0

    no_positives = confusion_metrics([0.9, 0.1], [0, 0])
    assert no_positives.recall is None
    assert no_positives.precision == 0.0
    assert no_positives.f1 is None
    assert no_positives.accuracy == 0.5


def test_f1_from_counts():
    m = ConfusionMetrics(tp=3, fp=1, tn=5, fn=2, threshold=0.5)
    assert m.f1 == pytest.approx(2 * m.precision * m.recall / (m.precision + m.recall))


def test_auc():
    assert auc([0.8, 0.6, 0.4], [1, 0, 1]) == 0.5
    assert auc([0.9, 0.1], [1, 0]) == 1.0
    assert auc([0.1, 0.9], [1, 0]) == 0.0
    assert auc([0.5, 0.5], [1, 0]) == 0.5


def pairwise_auc(scores, labels):
    pos = [s for s, y in zip(scores, labels) if y == 1]
    neg = [s for s, y in zip(scores, labels) if y == 0]
    wins = sum(1.0 if p > n else 0.5 if p == n else 0.0 for p, n in itertools.product(pos, neg))
    return wins / (len(pos) * len(neg))


@given(
    st.lists(st.tuples(st.integers(0, 6), st.integers(0, 1)), min_size=2, max_size=40).filter(
        lambda rows: 0 < sum(y for _, y in rows) < len(rows)
    )
)
def test_auc_matches_pairwise_count(rows):
    scores = [s / 4 for s, _ in rows]
    labels = [y for _, y in rows]
    assert auc(scores, labels) == pytest.approx(pairwise_auc(scores, labels))


@pytest.mark.parametrize(
    ("scores", "labels", "message"),
    [
        ([0.1, 0.2], [1], "2 scores for 1 labels"),
        ([], [], "at least one"),
        ([0.1, 0.2], [0, 2], "0 or 1"),
        ([np.nan, 0.2], [0, 1], "NaN"),
    ],
)
def test_metric_input_errors(scores, labels, message):
    with pytest.raises(DataError, match=message):
        confusion_metrics(scores, labels)


def test_auc_needs_both_classes():
    with pytest.raises(DataError, match="both classes"):
        auc([0.3, 0.4], [1, 1])


def test_pr_curve():
    curve = pr_curve([0.9, 0.8, 0.3], [1, 0, 1])
    assert curve.thresholds == [0.9, 0.8, 0.3]
    assert curve.precision == pytest.approx([1.0, 0.5, 2 / 3])
    assert curve.recall == [0.5, 0.5, 1.0]
    assert curve.average_precision == pytest.approx(0.5 + 0.5 * 2 / 3)
    assert set(curve.as_dict()) == {"thresholds", "precision", "recall", "average_precision"}

    tied = pr_curve([0.5, 0.5, 0.1], [1, 0, 0])
    assert tied.thresholds == [0.5, 0.1]
    assert tied.precision == pytest.approx([0.5, 1 / 3])

    with pytest.raises(DataError, match="positive"):
        pr_curve([0.2], [0])
