"""
Feature-set ablation: one model per feature set, trained and tested on the
same rows, reported in a fixed set order.
"""
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Mapping, NamedTuple, Optional, Sequence, Union

from fraudlab.core import ConfigError, DataError
from fraudlab.evaluation.metrics import ConfusionMetrics, PRCurve, auc, confusion_metrics, metric_value, pr_curve
from fraudlab.evaluation.split import SplitConfig, check_app_disjoint, record_split, split_matrix
from fraudlab.features.matrix import FeatureMatrix, export_matrix, matrix_from_rows
from fraudlab.features.featurize import featurize
from fraudlab.features.profiles import build_profiles
from fraudlab.labeling.models import LabelSet
from fraudlab.records.models import AppCatalogEntry, EventKind, EventRecord, FraudType, GroundTruthEntry
from fraudlab.simulator.config import SimConfig
from fraudlab.trees import TrainParams, TreeEnsemble, predict_batch, train
from fraudlab.utils import dump_json

logger = logging.getLogger(__name__)

ABLATION_SETS = ("device", "app", "new", "previous", "all")
DEFAULT_THRESHOLD = 0.5
REPORT_FILE = "eval_report.json"
TABLE_FILE = "ablation_table.csv"
TABLE_HEADER = "feature_set,n_features,precision,recall,f1,auc,accuracy"


@dataclass(frozen=True)
class SetResult:
    """Test metrics of the model trained on one feature set."""

    feature_set: str
    n_features: int
    confusion: ConfusionMetrics
    auc: float
    pr: PRCurve

    def as_dict(self) -> Dict:
        return {
            "feature_set": self.feature_set,
            "n_features": self.n_features,
            "auc": self.auc,
            "pr_curve": self.pr.as_dict(),
            **self.confusion.as_dict(),
        }

    def table_row(self) -> str:
        c = self.confusion
        cells = [metric_value(v) for v in (c.precision, c.recall, c.f1, self.auc, c.accuracy)]
        cells = [v if isinstance(v, str) else repr(v) for v in cells]
        return ",".join([self.feature_set, str(self.n_features), *cells])


@dataclass
class EvalReport:
    """
    Per feature-set metrics at one decision threshold, with the split, seed
    and class balance they were measured on.
    """

    rows: List[SetResult]
    threshold: float
    split: Dict
    seed: int
    class_balance: Dict[str, Dict[str, int]]
    params: Dict = field(default_factory=dict)
    config_hash: Optional[str] = None

    def __getitem__(self, feature_set: str) -> SetResult:
        for row in self.rows:
            if row.feature_set == feature_set:
                return row
        raise KeyError(feature_set)

    def as_dict(self) -> Dict:
        return {
            "threshold": self.threshold,
            "split": self.split,
            "seed": self.seed,
            "class_balance": self.class_balance,
            "params": self.params,
            "config_hash": self.config_hash,
            "feature_sets": [row.as_dict() for row in self.rows],
        }

    def table_csv(self) -> str:
        return "\n".join([TABLE_HEADER, *(row.table_row() for row in self.rows)]) + "\n"

    def write(self, out_dir: Union[str, Path]) -> Dict[str, Path]:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        paths = {"report": out_dir / REPORT_FILE, "table": out_dir / TABLE_FILE}
        dump_json(self.as_dict(), paths["report"])
        paths["table"].write_text(self.table_csv())
        return paths


def fit(matrix: FeatureMatrix, params: Optional[TrainParams] = None) -> TreeEnsemble:
    """Train on a matrix, binding the model to its manifest."""
    return train(
        matrix.X,
        matrix.y,
        params,
        feature_names=matrix.feature_names,
        feature_manifest_hash=matrix.manifest_hash,
    )


def evaluate_model(model: TreeEnsemble, matrix: FeatureMatrix, threshold: float = DEFAULT_THRESHOLD) -> SetResult:
    """
    Raises:
        ManifestMismatchError: the matrix was built from another manifest
        DataError: the matrix holds a single class
    """
    scores = predict_batch(model, matrix.X, manifest_hash=matrix.manifest_hash)
    return SetResult(
        feature_set=matrix.feature_set,
        n_features=len(matrix.features),
        confusion=confusion_metrics(scores, matrix.y, threshold),
        auc=auc(scores, matrix.y),
        pr=pr_curve(scores, matrix.y),
    )


def _fit_and_evaluate(train_matrix: FeatureMatrix, test_matrix: FeatureMatrix, params, threshold) -> SetResult:
    model = fit(train_matrix, params)
    result = evaluate_model(model, test_matrix, threshold)
    f1 = metric_value(result.confusion.f1)
    logger.info(f"Feature set {train_matrix.feature_set!r}: AUC {result.auc:.4f}, F1 {f1}")
    return result


def _balance(matrix: FeatureMatrix) -> Dict[str, int]:
    return {"n_pos": matrix.n_pos, "n_neg": matrix.n_neg, "n_apps": len(set(matrix.app_ids))}


def run_ablation(
    train_matrix: FeatureMatrix,
    test_matrix: FeatureMatrix,
    feature_sets: Sequence[str] = ABLATION_SETS,
    params: Optional[TrainParams] = None,
    threshold: float = DEFAULT_THRESHOLD,
    split: Optional[Dict] = None,
    n_workers: int = 1,
) -> EvalReport:
    """
    Train one model per feature set on the projected train columns and
    score it on the projected test columns.

    The sets are independent; with ``n_workers > 1`` they are fitted in a
    process pool. The report keeps the order of ``feature_sets`` either way.

    Raises:
        DataError: an app has rows on both sides, or a side lacks a class
    """
    check_app_disjoint(train_matrix.app_ids, test_matrix.app_ids)
    params = params or TrainParams()
    jobs = [(train_matrix.select(s), test_matrix.select(s), params, threshold) for s in feature_sets]
    if n_workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=min(n_workers, len(jobs))) as executor:
            futures = [executor.submit(_fit_and_evaluate, *job) for job in jobs]
            rows = [f.result() for f in futures]
    else:
        rows = [_fit_and_evaluate(*job) for job in jobs]
    return EvalReport(
        rows=rows,
        threshold=threshold,
        split=split or {},
        seed=params.seed,
        class_balance={"train": _balance(train_matrix), "test": _balance(test_matrix)},
        params=params.model_dump(),
    )


class LabeledLog(NamedTuple):
    """An event log with its catalog and labels."""

    log: Sequence[EventRecord]
    catalog: Mapping[str, AppCatalogEntry]
    labels: LabelSet


def second_run_config(config: SimConfig, split: SplitConfig) -> SimConfig:
    """The simulation behind the second-run test log: same market, new seed and app ids."""
    if split.second_run_app_prefix == config.app_id_prefix:
        raise ConfigError("the second run needs an app-id prefix different from the first")
    return SimConfig(
        **{
            **config.model_dump(mode="json"),
            "seed": split.second_run_seed,
            "app_id_prefix": split.second_run_app_prefix,
        }
    )


def ablate(
    first: LabeledLog,
    split: Optional[SplitConfig] = None,
    params: Optional[TrainParams] = None,
    second: Optional[LabeledLog] = None,
    feature_sets: Sequence[str] = ABLATION_SETS,
    threshold: float = DEFAULT_THRESHOLD,
    n_workers: int = 1,
) -> EvalReport:
    """
    Export the labeled downloads of ``first`` and run the ablation on an
    app-disjoint split of them, or train on all of them and test on
    ``second`` in second-run validation.

    Raises:
        ConfigError: second-run validation without a second log
    """
    split = split or SplitConfig()
    matrix = export_matrix(first.log, first.labels, first.catalog)
    if split.validation == "second_run":
        if second is None:
            raise ConfigError("second-run validation needs a second labeled log")
        train_matrix, test_matrix = matrix, export_matrix(second.log, second.labels, second.catalog)
    else:
        train_matrix, test_matrix = split_matrix(matrix, split)
    return run_ablation(
        train_matrix,
        test_matrix,
        feature_sets=feature_sets,
        params=params,
        threshold=threshold,
        split=split.model_dump(),
        n_workers=n_workers,
    )


def fraud_type_auc(
    log: Sequence[EventRecord],
    catalog: Mapping[str, AppCatalogEntry],
    ground_truth: Sequence[GroundTruthEntry],
    fraud_type: FraudType = FraudType.type3,
    params: Optional[TrainParams] = None,
    feature_set: str = "all",
    test_fraction: float = 0.3,
    seed: int = 0,
) -> float:
    """
    Test AUC of a model separating the downloads of one fraud type from
    legit downloads, labeled by simulator ground truth.

    Fraud and legit downloads share apps here, so the split is by record.

    Raises:
        DataError: the log holds no download of one of the two kinds
    """
    truth = {g.event_id: g.fraud_type for g in ground_truth}
    profiles = build_profiles(log)
    rows = []
    for record in log:
        if record.kind != EventKind.download or truth.get(record.event_id) not in (FraudType.legit, fraud_type):
            continue
        values = featurize(record, profiles, catalog).values
        rows.append((record.event_id, record.app_id, values, int(truth[record.event_id] == fraud_type)))
    matrix = matrix_from_rows(rows, feature_set)
    if matrix.n_pos == 0 or matrix.n_neg == 0:
        raise DataError(f"need both {fraud_type.name} and legit downloads")
    train_rows, test_rows = record_split(matrix.y, test_fraction, seed)
    model = fit(matrix.take(train_rows), params)
    test = matrix.take(test_rows)
    score = auc(predict_batch(model, test.X, manifest_hash=test.manifest_hash), test.y)
    logger.info(f"{fraud_type.name} vs legit: AUC {score:.4f} on {len(test)} test records")
    return score
