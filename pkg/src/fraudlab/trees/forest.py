"""
Gini feature importance from a forest of randomized classification trees.
"""
import logging
from typing import List, NamedTuple, Optional, Sequence

import numpy as np

from fraudlab.core import DataError
from fraudlab.trees.params import ImportanceParams
from fraudlab.trees.split import BinnedFeatures, best_gini_split, bin_features, check_training_data

logger = logging.getLogger(__name__)


class RankedFeature(NamedTuple):
    feature: str
    importance: float
    rank: int


def _tree_importance(
    binned: BinnedFeatures,
    X: np.ndarray,
    y: np.ndarray,
    w: np.ndarray,
    params: ImportanceParams,
    rng: np.random.Generator,
) -> np.ndarray:
    k = X.shape[1]
    m = params.n_candidates(k)
    importance = np.zeros(k)
    stack = [(np.flatnonzero(w > 0), 0)]
    while stack:
        rows, depth = stack.pop()
        if len(rows) < 2 or (params.max_depth is not None and depth >= params.max_depth):
            continue
        labels = y[rows]
        if labels.min() == labels.max():
            continue
        features: Sequence[int] = range(k)
        if m < k:
            features = sorted(int(j) for j in rng.choice(k, size=m, replace=False))
        split = best_gini_split(binned, X, rows, y, w, features, rng if params.splitter == "random" else None)
        if split is None:
            continue
        importance[split.feature] += split.score
        stack.append((split.right, depth + 1))
        stack.append((split.left, depth + 1))
    return importance


def gini_importance(
    X: np.ndarray,
    y: np.ndarray,
    params: Optional[ImportanceParams] = None,
    sample_weight: Optional[np.ndarray] = None,
    feature_names: Optional[Sequence[str]] = None,
) -> np.ndarray:
    """
    Mean decrease in Gini impurity per feature over a forest of randomized
    trees.

    Every tree is grown on a bootstrap resample (as multinomial row weights)
    with ``max_features`` candidate features drawn per node. A split adds its
    weighted impurity decrease to its feature; each tree's totals are
    normalized, averaged over the trees that split at all, and normalized
    again so the result sums to 1.

    Args:
        X: feature rows
        y: 0/1 labels
        params: forest parameters
        sample_weight: per-row weights
        feature_names: column names for error messages

    Raises:
        DataError: as for training, or when no tree finds a single split
    """
    params = params or ImportanceParams()
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    names = list(feature_names) if feature_names is not None else None
    check_training_data(X, y, names)
    n, k = X.shape
    base_weight = np.ones(n) if sample_weight is None else np.asarray(sample_weight, dtype=np.float64)

    binned = bin_features(X)
    rng = np.random.default_rng(params.seed)
    total = np.zeros(k)
    n_used = 0
    for _ in range(params.n_estimators):
        w = base_weight
        if params.bootstrap:
            w = base_weight * rng.multinomial(n, np.full(n, 1.0 / n))
        importance = _tree_importance(binned, X, y, w, params, rng)
        tree_total = importance.sum()
        if tree_total > 0:
            total += importance / tree_total
            n_used += 1
    if n_used == 0:
        raise DataError("no tree of the forest found a split; importances are undefined")
    logger.info(f"Computed Gini importance from {n_used} of {params.n_estimators} trees")
    mean = total / n_used
    return mean / mean.sum()


def rank_features(importances: Sequence[float], feature_names: Sequence[str]) -> List[RankedFeature]:
    """
    Features by decreasing importance, ties in column order. Ranks start at 1.
    """
    if len(importances) != len(feature_names):
        raise DataError(f"{len(importances)} importances for {len(feature_names)} features")
    order = sorted(range(len(importances)), key=lambda j: (-importances[j], j))
    return [RankedFeature(feature_names[j], float(importances[j]), rank) for rank, j in enumerate(order, start=1)]
