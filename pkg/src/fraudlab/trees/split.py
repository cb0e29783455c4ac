"""
Exact greedy split search shared by the booster and the importance forest.

Features are encoded once as codes into their sorted unique values. A node's
candidate thresholds are the midpoints between consecutive values present
among its rows; rows with ``x < threshold`` go left. Ties in the split
criterion are broken by the lower feature index, then the lower threshold.
"""
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from fraudlab.core import DataError


def gini_impurity(label_counts: Sequence[float]) -> float:
    """
    ``1 - sum(p_i^2)`` over the class proportions of a node.

    Raises:
        DataError: negative counts or an empty node
    """
    if any(c < 0 for c in label_counts):
        raise DataError("label counts must be non-negative")
    total = float(sum(label_counts))
    if total <= 0:
        raise DataError("Gini impurity of an empty node is undefined")
    impurity = 1.0
    for count in label_counts:
        p = count / total
        impurity -= p * p
    return impurity


def split_gain(GL, HL, GR, HR, lambda_l2: float):
    """
    Regularized second-order gain of splitting a node into left and right.
    Works elementwise on arrays.
    """
    G = GL + GR
    H = HL + HR
    return 0.5 * (GL * GL / (HL + lambda_l2) + GR * GR / (HR + lambda_l2) - G * G / (H + lambda_l2))


def midpoint(low: float, high: float) -> float:
    """A threshold routing ``low`` left and ``high`` right."""
    mid = (low + high) / 2.0
    return float(high) if mid <= low else float(mid)


@dataclass(frozen=True)
class BinnedFeatures:
    """Per-feature sorted unique values and the code of every row."""

    values: List[np.ndarray]
    codes: List[np.ndarray]

    @property
    def n_features(self) -> int:
        return len(self.values)


def bin_features(X: np.ndarray) -> BinnedFeatures:
    values, codes = [], []
    for j in range(X.shape[1]):
        uniques, inverse = np.unique(X[:, j], return_inverse=True)
        values.append(uniques)
        codes.append(inverse.reshape(-1).astype(np.int64))
    return BinnedFeatures(values=values, codes=codes)


def check_training_data(X: np.ndarray, y: np.ndarray, feature_names: Optional[Sequence[str]] = None):
    """
    Raises:
        DataError: shape mismatch, NaN or infinite features, fewer than two
            rows, labels other than 0/1, or a single class
    """
    if X.ndim != 2 or X.shape[0] != len(y):
        raise DataError(f"matrix of shape {X.shape} does not match {len(y)} labels")
    if X.shape[0] < 2:
        raise DataError("training needs at least two rows")
    bad = ~np.isfinite(X)
    if bad.any():
        column = int(np.flatnonzero(bad.any(axis=0))[0])
        name = feature_names[column] if feature_names is not None else f"column {column}"
        raise DataError(f"feature {name} holds NaN or infinite values")
    if not np.isin(y, (0, 1)).all():
        raise DataError("labels must be 0 or 1")
    if y.min() == y.max():
        raise DataError("training needs both classes")


@dataclass(frozen=True)
class Split:
    feature: int
    threshold: float
    score: float
    left: np.ndarray
    right: np.ndarray


def best_gradient_split(
    binned: BinnedFeatures,
    rows: np.ndarray,
    g: np.ndarray,
    h: np.ndarray,
    features: Sequence[int],
    lambda_l2: float,
    min_child_weight: float = 0.0,
) -> Optional[Split]:
    """
    The split of ``rows`` with the largest regularized gain, searching every
    threshold of every feature in ``features`` (ascending). Both children
    must keep a hessian sum of at least ``min_child_weight``.
    """
    best = None
    best_gain = -np.inf
    g_rows, h_rows = g[rows], h[rows]
    for j in sorted(features):
        codes = binned.codes[j][rows]
        m = len(binned.values[j])
        present = np.flatnonzero(np.bincount(codes, minlength=m))
        if len(present) < 2:
            continue
        G = np.cumsum(np.bincount(codes, weights=g_rows, minlength=m)[present])
        H = np.cumsum(np.bincount(codes, weights=h_rows, minlength=m)[present])
        GL, HL = G[:-1], H[:-1]
        GR, HR = G[-1] - GL, H[-1] - HL
        gains = split_gain(GL, HL, GR, HR, lambda_l2)
        gains = np.where((HL >= min_child_weight) & (HR >= min_child_weight), gains, -np.inf)
        k = int(np.argmax(gains))
        if gains[k] > best_gain:
            best_gain = float(gains[k])
            best = (j, k, present)
    if best is None or not np.isfinite(best_gain):
        return None
    j, k, present = best
    cut = present[k]
    go_left = binned.codes[j][rows] <= cut
    return Split(
        feature=j,
        threshold=midpoint(binned.values[j][cut], binned.values[j][present[k + 1]]),
        score=best_gain,
        left=rows[go_left],
        right=rows[~go_left],
    )


def gini_children(n_pos_left, n_left, n_pos_right, n_right):
    """Gini impurity of left and right children from weighted class counts."""
    p_left = n_pos_left / n_left
    p_right = n_pos_right / n_right
    gini_left = 1.0 - p_left * p_left - (1.0 - p_left) * (1.0 - p_left)
    gini_right = 1.0 - p_right * p_right - (1.0 - p_right) * (1.0 - p_right)
    return gini_left, gini_right


def best_gini_split(
    binned: BinnedFeatures,
    X: np.ndarray,
    rows: np.ndarray,
    y: np.ndarray,
    w: np.ndarray,
    features: Sequence[int],
    rng: Optional[np.random.Generator] = None,
) -> Optional[Split]:
    """
    The split of ``rows`` with the largest weighted decrease in Gini
    impurity, ``N_t*gini_t - N_l*gini_l - N_r*gini_r``.

    With an ``rng`` every candidate feature gets one threshold drawn
    uniformly between its node minimum and maximum instead of the exhaustive
    search.
    """
    w_rows = w[rows]
    wy_rows = w_rows * y[rows]
    n_t = float(w_rows.sum())
    pos_t = float(wy_rows.sum())
    gini_t = gini_impurity((pos_t, n_t - pos_t))
    best = None
    best_decrease = 0.0
    for j in sorted(features):
        if rng is None:
            codes = binned.codes[j][rows]
            m = len(binned.values[j])
            present = np.flatnonzero(np.bincount(codes, minlength=m))
            if len(present) < 2:
                continue
            n_left = np.cumsum(np.bincount(codes, weights=w_rows, minlength=m)[present])[:-1]
            pos_left = np.cumsum(np.bincount(codes, weights=wy_rows, minlength=m)[present])[:-1]
            n_right, pos_right = n_t - n_left, pos_t - pos_left
            gini_left, gini_right = gini_children(pos_left, n_left, pos_right, n_right)
            decrease = n_t * gini_t - n_left * gini_left - n_right * gini_right
            k = int(np.argmax(decrease))
            if decrease[k] > best_decrease:
                best_decrease = float(decrease[k])
                cut = present[k]
                best = (j, midpoint(binned.values[j][cut], binned.values[j][present[k + 1]]))
        else:
            x = X[rows, j]
            low, high = float(x.min()), float(x.max())
            if low == high:
                continue
            threshold = float(rng.uniform(low, high))
            if threshold <= low:
                continue
            go_left = x < threshold
            n_left, pos_left = float(w_rows[go_left].sum()), float(wy_rows[go_left].sum())
            n_right, pos_right = n_t - n_left, pos_t - pos_left
            gini_left, gini_right = gini_children(pos_left, n_left, pos_right, n_right)
            decrease = n_t * gini_t - n_left * gini_left - n_right * gini_right
            if decrease > best_decrease:
                best_decrease = decrease
                best = (j, threshold)
    if best is None:
        return None
    j, threshold = best
    go_left = X[rows, j] < threshold
    return Split(feature=j, threshold=threshold, score=best_decrease, left=rows[go_left], right=rows[~go_left])
