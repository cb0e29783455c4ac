"""Gradient-boosted trees, Gini importance and model files."""
from fraudlab.trees.booster import Tree, TreeEnsemble, check_manifest, predict, predict_batch, sigmoid, train
from fraudlab.trees.forest import RankedFeature, gini_importance, rank_features
from fraudlab.trees.model_file import (
    MODEL_FORMAT_VERSION,
    deserialize,
    importance_csv,
    load_model,
    save_model,
    serialize,
    write_importances,
)
from fraudlab.trees.params import ImportanceParams, TrainParams
from fraudlab.trees.split import best_gini_split, best_gradient_split, bin_features, gini_impurity, split_gain

__all__ = [
    "MODEL_FORMAT_VERSION",
    "ImportanceParams",
    "RankedFeature",
    "TrainParams",
    "Tree",
    "TreeEnsemble",
    "best_gini_split",
    "best_gradient_split",
    "bin_features",
    "check_manifest",
    "deserialize",
    "gini_importance",
    "gini_impurity",
    "importance_csv",
    "load_model",
    "predict",
    "predict_batch",
    "rank_features",
    "save_model",
    "serialize",
    "sigmoid",
    "split_gain",
    "train",
    "write_importances",
]
