import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fraudlab.core import DataError
from fraudlab.trees import (
    ImportanceParams,
    best_gini_split,
    best_gradient_split,
    bin_features,
    gini_impurity,
    split_gain,
)
from fraudlab.trees.split import check_training_data, midpoint


@pytest.mark.parametrize(
    ("counts", "impurity"),
    [((1, 1), 0.5), ((2, 0), 0.0), ((3, 1), 0.375), ((0, 5), 0.0), ((1, 1, 1, 1), 0.75)],
)
def test_gini_impurity(counts, impurity):
    assert gini_impurity(counts) == pytest.approx(impurity)


def test_gini_impurity_errors():
    with pytest.raises(DataError):
        gini_impurity((0, 0))
    with pytest.raises(DataError):
        gini_impurity((-1, 2))


def test_split_gain():
    # separating two opposite gradients is worth their full structure score
    assert split_gain(-2.0, 1.0, 2.0, 1.0, 0.0) == pytest.approx(4.0)
    assert split_gain(1.0, 1.0, 1.0, 1.0, 1.0) == pytest.approx(0.5 * (0.5 + 0.5 - 4 / 3))


def test_midpoint():
    assert midpoint(1.0, 2.0) == 1.5
    high = np.nextafter(1.0, 2.0)
    assert midpoint(1.0, high) == high


def test_check_training_data():
    X = np.array([[0.0, 1.0], [1.0, np.nan]])
    with pytest.raises(DataError, match="feature b"):
        check_training_data(X, np.array([0, 1]), ["a", "b"])
    with pytest.raises(DataError, match="both classes"):
        check_training_data(np.zeros((3, 1)), np.ones(3))
    with pytest.raises(DataError, match="0 or 1"):
        check_training_data(np.zeros((2, 1)), np.array([0, 2]))
    with pytest.raises(DataError, match="two rows"):
        check_training_data(np.zeros((1, 1)), np.array([1]))
    with pytest.raises(DataError, match="does not match"):
        check_training_data(np.zeros((3, 1)), np.array([0, 1]))


def exhaustive_gradient_split(X, g, h, lambda_l2):
    best = None
    for j in range(X.shape[1]):
        values = np.unique(X[:, j])
        for low, high in zip(values, values[1:]):
            left = X[:, j] <= low
            gain = split_gain(g[left].sum(), h[left].sum(), g[~left].sum(), h[~left].sum(), lambda_l2)
            if best is None or gain > best[0]:
                best = (gain, j, (low + high) / 2)
    return best


dyadic = st.sampled_from([0.0, 0.5, 1.0, 1.5, 2.0, 3.0])


@settings(max_examples=200, deadline=None)
@given(
    st.integers(min_value=2, max_value=12).flatmap(
        lambda n: st.tuples(
            st.lists(st.tuples(dyadic, dyadic, dyadic), min_size=n, max_size=n),
            st.lists(st.sampled_from([-1.0, -0.5, -0.25, 0.25, 0.5, 1.0]), min_size=n, max_size=n),
            st.lists(st.sampled_from([0.25, 0.5, 1.0]), min_size=n, max_size=n),
        )
    )
)
def test_gradient_split_matches_exhaustive_search(data):
    rows, g, h = data
    X, g, h = np.array(rows), np.array(g), np.array(h)
    split = best_gradient_split(bin_features(X), np.arange(len(X)), g, h, [0, 1, 2], lambda_l2=1.0)
    expected = exhaustive_gradient_split(X, g, h, 1.0)
    if expected is None:
        assert split is None
        return
    assert split is not None
    assert (split.score, split.feature, split.threshold) == expected
    assert sorted(np.concatenate([split.left, split.right]).tolist()) == list(range(len(X)))
    assert (X[split.left, split.feature] < split.threshold).all()
    assert (X[split.right, split.feature] >= split.threshold).all()


def test_gradient_split_min_child_weight():
    X = np.array([[0.0], [1.0], [2.0]])
    g = np.array([-1.0, 1.0, 1.0])
    h = np.ones(3)
    rows = np.arange(3)
    assert best_gradient_split(bin_features(X), rows, g, h, [0], 1.0, min_child_weight=1.0).threshold == 0.5
    assert best_gradient_split(bin_features(X), rows, g, h, [0], 1.0, min_child_weight=1.5) is None


def test_gini_split():
    X = np.array([[0.0, 5.0], [1.0, 5.0], [2.0, 5.0], [3.0, 6.0]])
    y = np.array([0.0, 0.0, 1.0, 1.0])
    w = np.ones(4)
    split = best_gini_split(bin_features(X), X, np.arange(4), y, w, [0, 1])
    assert split.feature == 0
    assert split.threshold == 1.5
    # the root impurity 0.5 over weight 4 vanishes completely
    assert split.score == pytest.approx(2.0)
    assert split.left.tolist() == [0, 1]


def test_gini_split_weights():
    X = np.array([[0.0], [1.0], [2.0]])
    y = np.array([0.0, 1.0, 0.0])
    rows = np.arange(3)
    # both cuts tie under unit weights
    assert best_gini_split(bin_features(X), X, rows, y, np.ones(3), [0]).threshold == 0.5
    split = best_gini_split(bin_features(X), X, rows, y, np.array([1.0, 1.0, 3.0]), [0])
    assert split.threshold == 1.5
    assert split.score == pytest.approx(0.6)


def test_random_gini_split():
    X = np.array([[0.0], [1.0], [2.0], [3.0]])
    y = np.array([0.0, 0.0, 1.0, 1.0])
    rng = np.random.default_rng(0)
    split = best_gini_split(bin_features(X), X, np.arange(4), y, np.ones(4), [0], rng=rng)
    assert split is not None
    assert 0.0 < split.threshold < 3.0
    assert len(split.left) + len(split.right) == 4


@pytest.mark.parametrize(
    ("max_features", "expected"),
    [("sqrt", 4), ("log2", 4), (0.5, 10), (None, 21), (100, 21), (3, 3), (0.01, 1)],
)
def test_n_candidates(max_features, expected):
    assert ImportanceParams(max_features=max_features).n_candidates(21) == expected
