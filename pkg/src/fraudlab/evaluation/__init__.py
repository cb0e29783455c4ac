"""Metrics, app-disjoint splits, ablation, comparative analysis and the type-1 rule filter."""
from fraudlab.evaluation.ablation import (
    ABLATION_SETS,
    EvalReport,
    LabeledLog,
    SetResult,
    ablate,
    evaluate_model,
    fit,
    fraud_type_auc,
    run_ablation,
    second_run_config,
)
from fraudlab.evaluation.analysis import (
    RATING_BINS,
    AnalysisReport,
    category_distribution,
    coefficient_of_variation,
    comparative_analysis,
    hourly_histogram,
    rating_bin,
    rating_histogram,
)
from fraudlab.evaluation.metrics import UNDEFINED, ConfusionMetrics, PRCurve, auc, confusion_metrics, pr_curve
from fraudlab.evaluation.rule_filter import (
    FLAG_CODEC,
    FilterConfig,
    FilterReason,
    FlagRecord,
    filter_hits,
    filter_quality,
    type1_rule_filter,
)
from fraudlab.evaluation.split import SplitConfig, app_split, check_app_disjoint, record_split, split_matrix

__all__ = [
    "ABLATION_SETS",
    "FLAG_CODEC",
    "RATING_BINS",
    "UNDEFINED",
    "AnalysisReport",
    "ConfusionMetrics",
    "EvalReport",
    "FilterConfig",
    "FilterReason",
    "FlagRecord",
    "LabeledLog",
    "PRCurve",
    "SetResult",
    "SplitConfig",
    "ablate",
    "app_split",
    "auc",
    "category_distribution",
    "check_app_disjoint",
    "coefficient_of_variation",
    "comparative_analysis",
    "confusion_metrics",
    "evaluate_model",
    "filter_hits",
    "filter_quality",
    "fit",
    "fraud_type_auc",
    "hourly_histogram",
    "pr_curve",
    "rating_bin",
    "rating_histogram",
    "record_split",
    "run_ablation",
    "second_run_config",
    "split_matrix",
    "type1_rule_filter",
]
