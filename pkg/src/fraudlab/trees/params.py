"""
Training parameters of the booster and the importance forest.
"""
import math
from typing import Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field


class TrainParams(BaseModel):
    """
    Gradient-boosting parameters. ``gamma`` is the minimum gain a split must
    exceed; ``subsample`` and ``colsample`` draw rows per round and features
    per tree from ``seed``.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    n_trees: int = Field(200, ge=0, le=100000)
    max_depth: int = Field(6, ge=1, le=32)
    learning_rate: float = Field(0.1, gt=0, le=1)
    min_child_weight: float = Field(1.0, ge=0)
    subsample: float = Field(1.0, gt=0, le=1)
    colsample: float = Field(1.0, gt=0, le=1)
    lambda_l2: float = Field(1.0, ge=0)
    gamma: float = Field(0.0, ge=0)
    seed: int = Field(0, ge=0, lt=2**64)


class ImportanceParams(BaseModel):
    """
    Randomized-forest parameters for Gini importance. ``max_features`` is the
    number of candidate features per node: a count, a fraction, ``sqrt``,
    ``log2`` or None for all of them.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    n_estimators: int = Field(50, ge=1, le=10000)
    max_depth: Optional[int] = Field(8, ge=1)
    max_features: Union[Literal["sqrt", "log2"], int, float, None] = "sqrt"
    bootstrap: bool = True
    splitter: Literal["best", "random"] = "best"
    seed: int = Field(0, ge=0, lt=2**64)

    def n_candidates(self, n_features: int) -> int:
        """Number of features drawn at each node."""
        mf = self.max_features
        if mf is None:
            return n_features
        if mf == "sqrt":
            k = int(n_features**0.5)
        elif mf == "log2":
            k = int(math.log2(n_features)) if n_features > 1 else 1
        elif isinstance(mf, float):
            k = int(mf * n_features)
        else:
            k = int(mf)
        return max(1, min(n_features, k))
