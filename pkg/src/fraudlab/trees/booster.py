"""
Gradient-boosted regression trees with a logistic link.
"""
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from fraudlab.core import ManifestMismatchError
from fraudlab.trees.params import TrainParams
from fraudlab.trees.split import BinnedFeatures, best_gradient_split, bin_features, check_training_data

logger = logging.getLogger(__name__)

LEAF = -1
MARGIN_LIMIT = 30.0


@dataclass
class Tree:
    """
    A regression tree in flat arrays. Node 0 is the root; a node with
    ``feature == -1`` is a leaf holding ``value``, any other node sends rows
    with ``x[feature] < threshold`` to ``left`` and the rest to ``right``.
    """

    feature: List[int] = field(default_factory=list)
    threshold: List[float] = field(default_factory=list)
    left: List[int] = field(default_factory=list)
    right: List[int] = field(default_factory=list)
    value: List[float] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.feature)

    def add_node(self) -> int:
        self.feature.append(LEAF)
        self.threshold.append(0.0)
        self.left.append(LEAF)
        self.right.append(LEAF)
        self.value.append(0.0)
        return len(self.feature) - 1

    @property
    def depth(self) -> int:
        depths = [0] * len(self)
        for node in range(len(self)):
            if self.feature[node] != LEAF:
                depths[self.left[node]] = depths[self.right[node]] = depths[node] + 1
        return max(depths, default=0)

    def apply(self, X: np.ndarray) -> np.ndarray:
        """Leaf index of every row."""
        feature = np.asarray(self.feature, dtype=np.int64)
        threshold = np.asarray(self.threshold, dtype=np.float64)
        left = np.asarray(self.left, dtype=np.int64)
        right = np.asarray(self.right, dtype=np.int64)
        node = np.zeros(X.shape[0], dtype=np.int64)
        active = np.flatnonzero(feature[node] != LEAF)
        while len(active):
            at = node[active]
            go_left = X[active, feature[at]] < threshold[at]
            node[active] = np.where(go_left, left[at], right[at])
            active = active[feature[node[active]] != LEAF]
        return node

    def predict(self, X: np.ndarray) -> np.ndarray:
        return np.asarray(self.value, dtype=np.float64)[self.apply(X)]


@dataclass
class TreeEnsemble:
    """
    An additive tree model: ``p = sigmoid(base_score + learning_rate * sum(tree outputs))``.
    """

    trees: List[Tree]
    learning_rate: float
    base_score: float
    feature_manifest_hash: str = ""
    feature_names: List[str] = field(default_factory=list)
    params: Optional[TrainParams] = None
    train_loss: List[float] = field(default_factory=list)

    @property
    def n_features(self) -> int:
        return len(self.feature_names)

    def raw_score(self, X: np.ndarray) -> np.ndarray:
        total = np.zeros(X.shape[0], dtype=np.float64)
        for tree in self.trees:
            total += tree.predict(X)
        return self.base_score + self.learning_rate * total


def sigmoid(margin: np.ndarray) -> np.ndarray:
    # clipped so exp cannot overflow; probabilities stay strictly inside (0, 1)
    return 1.0 / (1.0 + np.exp(-np.clip(margin, -MARGIN_LIMIT, MARGIN_LIMIT)))


def log_loss(y: np.ndarray, margin: np.ndarray, w: np.ndarray) -> float:
    return float(np.sum(w * (np.logaddexp(0.0, margin) - y * margin)) / np.sum(w))


def _grow(
    tree: Tree,
    binned: BinnedFeatures,
    rows: np.ndarray,
    g: np.ndarray,
    h: np.ndarray,
    features: Sequence[int],
    params: TrainParams,
    depth: int,
) -> int:
    node = tree.add_node()
    if depth < params.max_depth and len(rows) >= 2:
        split = best_gradient_split(binned, rows, g, h, features, params.lambda_l2, params.min_child_weight)
        if split is not None and split.score > max(params.gamma, 0.0):
            tree.feature[node] = split.feature
            tree.threshold[node] = split.threshold
            tree.left[node] = _grow(tree, binned, split.left, g, h, features, params, depth + 1)
            tree.right[node] = _grow(tree, binned, split.right, g, h, features, params, depth + 1)
            return node
    denominator = h[rows].sum() + params.lambda_l2
    tree.value[node] = float(-g[rows].sum() / denominator) if denominator > 0 else 0.0
    return node


def train(
    X: np.ndarray,
    y: np.ndarray,
    params: Optional[TrainParams] = None,
    sample_weight: Optional[np.ndarray] = None,
    feature_names: Optional[Sequence[str]] = None,
    feature_manifest_hash: str = "",
) -> TreeEnsemble:
    """
    Second-order gradient boosting on the logistic loss with exact greedy
    split search.

    ``base_score`` is the log-odds of the (weighted) training prevalence, so
    an ensemble without trees predicts the prevalence. Given the same data,
    parameters and seed, the resulting model is identical.

    Args:
        X: feature rows
        y: 0/1 labels
        params: boosting parameters
        sample_weight: per-row weights; a row of weight 2 counts like two copies
        feature_names: column names, used in error messages and the model file
        feature_manifest_hash: hash of the manifest the rows were built with

    Raises:
        DataError: fewer than two rows, a single class or non-finite features
    """
    params = params or TrainParams()
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    names = list(feature_names) if feature_names is not None else [f"f{j}" for j in range(X.shape[1])]
    check_training_data(X, y, names)
    w = np.ones(len(y)) if sample_weight is None else np.asarray(sample_weight, dtype=np.float64)

    prevalence = float(np.sum(w * y) / np.sum(w))
    base_score = float(np.log(prevalence / (1.0 - prevalence)))
    binned = bin_features(X)
    rng = np.random.default_rng(params.seed)
    n, k = X.shape
    all_rows = np.arange(n)
    all_features = list(range(k))

    margin = np.full(n, base_score)
    ensemble = TreeEnsemble(
        trees=[],
        learning_rate=params.learning_rate,
        base_score=base_score,
        feature_manifest_hash=feature_manifest_hash,
        feature_names=names,
        params=params,
        train_loss=[log_loss(y, margin, w)],
    )
    for round_ in range(params.n_trees):
        p = sigmoid(margin)
        g = w * (p - y)
        h = w * p * (1.0 - p)
        rows = all_rows
        if params.subsample < 1.0:
            rows = np.sort(rng.choice(n, size=max(1, int(round(params.subsample * n))), replace=False))
        features = all_features
        if params.colsample < 1.0:
            drawn = rng.choice(k, size=max(1, int(round(params.colsample * k))), replace=False)
            features = sorted(int(j) for j in drawn)
        tree = Tree()
        _grow(tree, binned, rows, g, h, features, params, 0)
        ensemble.trees.append(tree)
        margin = margin + params.learning_rate * tree.predict(X)
        ensemble.train_loss.append(log_loss(y, margin, w))
        if (round_ + 1) % 50 == 0:
            logger.debug(f"Round {round_ + 1}: training log loss {ensemble.train_loss[-1]:.6f}")
    logger.info(f"Trained {len(ensemble.trees)} trees on {n} rows x {k} features")
    return ensemble


def check_manifest(model: TreeEnsemble, n_features: int, manifest_hash: Optional[str] = None):
    """
    Raises:
        ManifestMismatchError: rows of another width, or built from another manifest
    """
    if n_features != model.n_features:
        raise ManifestMismatchError(f"model expects {model.n_features} features, rows have {n_features}")
    if manifest_hash is not None and manifest_hash != model.feature_manifest_hash:
        raise ManifestMismatchError(
            f"feature manifest {manifest_hash[:12]} does not match the model's {model.feature_manifest_hash[:12]}"
        )


def predict_batch(model: TreeEnsemble, X: np.ndarray, manifest_hash: Optional[str] = None) -> np.ndarray:
    """Probabilities of the positive class for every row of ``X``."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    check_manifest(model, X.shape[1], manifest_hash)
    return sigmoid(model.raw_score(X))


def predict(model: TreeEnsemble, row: Sequence[float], manifest_hash: Optional[str] = None) -> float:
    """Probability of the positive class for one row."""
    return float(predict_batch(model, np.asarray(row, dtype=np.float64).reshape(1, -1), manifest_hash)[0])
