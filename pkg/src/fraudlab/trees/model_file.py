"""
Versioned JSON model files and the importance report.
"""
from pathlib import Path
from typing import Dict, List, Sequence, Union

import orjson
from pydantic import ValidationError

from fraudlab.core import InputMissingError, ModelFormatError
from fraudlab.trees.booster import LEAF, Tree, TreeEnsemble
from fraudlab.trees.forest import RankedFeature
from fraudlab.trees.params import TrainParams
from fraudlab.utils import dumps_json
from fraudlab.validators import JSONSchemaValidator

MODEL_FORMAT = "fraudlab-tree-ensemble"
MODEL_FORMAT_VERSION = 1

_NUMBER_ARRAY = {"type": "array", "items": {"type": "number"}}
_INT_ARRAY = {"type": "array", "items": {"type": "integer"}}

MODEL_SCHEMA: Dict = {
    "type": "object",
    "required": [
        "format",
        "format_version",
        "base_score",
        "learning_rate",
        "feature_manifest_hash",
        "feature_names",
        "trees",
    ],
    "properties": {
        "format": {"const": MODEL_FORMAT},
        "format_version": {"type": "integer"},
        "base_score": {"type": "number"},
        "learning_rate": {"type": "number", "exclusiveMinimum": 0},
        "feature_manifest_hash": {"type": "string"},
        "feature_names": {"type": "array", "items": {"type": "string"}},
        "params": {"type": ["object", "null"]},
        "train_loss": _NUMBER_ARRAY,
        "trees": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["feature", "threshold", "left", "right", "value"],
                "additionalProperties": False,
                "properties": {
                    "feature": _INT_ARRAY,
                    "threshold": _NUMBER_ARRAY,
                    "left": _INT_ARRAY,
                    "right": _INT_ARRAY,
                    "value": _NUMBER_ARRAY,
                },
            },
        },
    },
}

model_validator = JSONSchemaValidator(MODEL_SCHEMA)


def model_to_dict(model: TreeEnsemble) -> Dict:
    return {
        "format": MODEL_FORMAT,
        "format_version": MODEL_FORMAT_VERSION,
        "base_score": model.base_score,
        "learning_rate": model.learning_rate,
        "feature_manifest_hash": model.feature_manifest_hash,
        "feature_names": list(model.feature_names),
        "params": model.params.model_dump() if model.params is not None else None,
        "train_loss": list(model.train_loss),
        "trees": [
            {
                "feature": tree.feature,
                "threshold": tree.threshold,
                "left": tree.left,
                "right": tree.right,
                "value": tree.value,
            }
            for tree in model.trees
        ],
    }


def serialize(model: TreeEnsemble) -> bytes:
    """Canonical bytes of a model; identical models give identical bytes."""
    return dumps_json(model_to_dict(model))


def _check_tree(index: int, doc: Dict, n_features: int) -> Tree:
    tree = Tree(**{key: list(values) for key, values in doc.items()})
    size = len(tree.feature)
    if size == 0 or any(len(values) != size for values in doc.values()):
        raise ModelFormatError(f"tree {index} has empty or ragged node arrays")
    for node in range(size):
        if tree.feature[node] == LEAF:
            continue
        if not 0 <= tree.feature[node] < n_features:
            raise ModelFormatError(f"tree {index} node {node} splits on unknown feature {tree.feature[node]}")
        # children always come after their parent, so every walk ends
        if not (node < tree.left[node] < size and node < tree.right[node] < size):
            raise ModelFormatError(f"tree {index} node {node} has out-of-order children")
    return tree


def deserialize(data: Union[bytes, str]) -> TreeEnsemble:
    """
    Raises:
        ModelFormatError: truncated or malformed JSON, an unknown format
            version or a document failing the model schema
    """
    try:
        doc = orjson.loads(data)
    except orjson.JSONDecodeError as exc:
        raise ModelFormatError(f"model file is truncated or not JSON ({exc})")
    if not isinstance(doc, dict):
        raise ModelFormatError("model file must hold a JSON object")
    version = doc.get("format_version")
    if version != MODEL_FORMAT_VERSION:
        raise ModelFormatError(f"model format version {version!r} is not supported (expected {MODEL_FORMAT_VERSION})")
    errors = model_validator.validation_errors(doc)
    if errors:
        raise ModelFormatError(f"model file fails its schema: {'; '.join(errors)}")
    try:
        params = TrainParams(**doc["params"]) if doc.get("params") is not None else None
    except ValidationError as exc:
        raise ModelFormatError(f"model file holds invalid training parameters: {exc}")
    n_features = len(doc["feature_names"])
    return TreeEnsemble(
        trees=[_check_tree(i, tree, n_features) for i, tree in enumerate(doc["trees"])],
        learning_rate=float(doc["learning_rate"]),
        base_score=float(doc["base_score"]),
        feature_manifest_hash=doc["feature_manifest_hash"],
        feature_names=list(doc["feature_names"]),
        params=params,
        train_loss=[float(v) for v in doc.get("train_loss", [])],
    )


def save_model(model: TreeEnsemble, path: Union[str, Path]):
    Path(path).write_bytes(serialize(model))


def load_model(path: Union[str, Path]) -> TreeEnsemble:
    path = Path(path)
    if not path.exists():
        raise InputMissingError(f"Missing input file {path}")
    return deserialize(path.read_bytes())


IMPORTANCE_HEADER = "feature,importance,rank"


def importance_csv(ranked: Sequence[RankedFeature]) -> str:
    lines: List[str] = [IMPORTANCE_HEADER]
    lines.extend(f"{r.feature},{r.importance!r},{r.rank}" for r in ranked)
    return "\n".join(lines) + "\n"


def write_importances(ranked: Sequence[RankedFeature], path: Union[str, Path]):
    Path(path).write_text(importance_csv(ranked))
