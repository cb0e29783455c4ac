"""
App-disjoint train/test splits.

All downloads of a suspicious app share its label, so a record-level split
would let a model recognize apps instead of fraud. Apps are assigned to one
side as a whole, stratified by app label.
"""
import logging
from typing import Iterable, List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from fraudlab.core import DataError
from fraudlab.features.matrix import FeatureMatrix

logger = logging.getLogger(__name__)


class SplitConfig(BaseModel):
    """
    How ablation models are validated.

    ``app_split`` holds out ``test_fraction`` of the apps of one log.
    ``second_run`` trains on the whole log and tests on a second simulated
    log with its own seed and app-id prefix, so no app is shared.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    validation: Literal["app_split", "second_run"] = "app_split"
    test_fraction: float = Field(0.3, gt=0, lt=1)
    stratify: bool = True
    seed: int = Field(0, ge=0, lt=2**64)
    second_run_seed: int = Field(20190101, ge=0, lt=2**64)
    second_run_app_prefix: str = Field("jan_", pattern=r"^[^,\s]*$")


def app_labels(app_ids: List[str], y: np.ndarray) -> dict:
    """An app is positive when any of its rows is."""
    labels: dict = {}
    for app_id, label in zip(app_ids, y):
        labels[app_id] = max(labels.get(app_id, 0), int(label))
    return labels


def _held_out(apps: List[str], fraction: float, rng: np.random.Generator) -> List[str]:
    if not apps:
        return []
    n_test = int(round(fraction * len(apps)))
    if len(apps) >= 2:
        n_test = min(max(n_test, 1), len(apps) - 1)
    order = rng.permutation(len(apps))
    return [apps[i] for i in order[:n_test]]


def app_split(
    app_ids: List[str], y: np.ndarray, config: Optional[SplitConfig] = None
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Row indices of the train and test sides, each ascending.

    With ``stratify`` the positive and negative apps are held out separately,
    so both sides see both classes whenever each class has two or more apps.
    """
    config = config or SplitConfig()
    labels = app_labels(app_ids, y)
    rng = np.random.default_rng(config.seed)
    if config.stratify:
        strata = [sorted(a for a, label in labels.items() if label == value) for value in (1, 0)]
    else:
        strata = [sorted(labels)]
    test_apps = set()
    for apps in strata:
        test_apps.update(_held_out(apps, config.test_fraction, rng))
    in_test = np.array([a in test_apps for a in app_ids], dtype=bool)
    train_rows, test_rows = np.flatnonzero(~in_test), np.flatnonzero(in_test)
    logger.info(
        f"Split {len(labels)} apps: {len(labels) - len(test_apps)} train ({len(train_rows)} rows), "
        f"{len(test_apps)} test ({len(test_rows)} rows)"
    )
    return train_rows, test_rows


def check_app_disjoint(train_app_ids: Iterable[str], test_app_ids: Iterable[str]):
    """
    Raises:
        DataError: an app has rows on both sides
    """
    leaked = sorted(set(train_app_ids) & set(test_app_ids))
    if leaked:
        shown = ", ".join(leaked[:5]) + (" ..." if len(leaked) > 5 else "")
        raise DataError(f"{len(leaked)} apps appear in both train and test: {shown}")


def split_matrix(matrix: FeatureMatrix, config: Optional[SplitConfig] = None) -> Tuple[FeatureMatrix, FeatureMatrix]:
    train_rows, test_rows = app_split(matrix.app_ids, matrix.y, config)
    train, test = matrix.take(train_rows), matrix.take(test_rows)
    check_app_disjoint(train.app_ids, test.app_ids)
    return train, test


def record_split(y: np.ndarray, fraction: float, seed: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Stratified record-level split, for experiments where labels are not
    shared across an app.
    """
    rng = np.random.default_rng(seed)
    test = []
    for value in (1, 0):
        rows = np.flatnonzero(np.asarray(y) == value)
        n_test = int(round(fraction * len(rows)))
        test.extend(int(r) for r in rng.permutation(rows)[:n_test])
    in_test = np.zeros(len(y), dtype=bool)
    in_test[test] = True
    return np.flatnonzero(~in_test), np.flatnonzero(in_test)
