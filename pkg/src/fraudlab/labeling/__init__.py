"""Ground-truth labels from the vendor flag."""
from fraudlab.labeling.builder import LabelBuilder
from fraudlab.labeling.models import (
    APP_STATUS_CODEC,
    LABEL_CODEC,
    AppStatus,
    AppStatusRecord,
    Label,
    LabelingConfig,
    LabelRecord,
    LabelSet,
)
from fraudlab.labeling.rules import (
    ClassBalance,
    app_status,
    app_suspicion_ratio,
    build_labels,
    class_balance,
    downloads_in_scope,
    label_app,
    sample_days,
)

__all__ = [
    "APP_STATUS_CODEC",
    "LABEL_CODEC",
    "AppStatus",
    "AppStatusRecord",
    "ClassBalance",
    "Label",
    "LabelBuilder",
    "LabelRecord",
    "LabelSet",
    "LabelingConfig",
    "app_status",
    "app_suspicion_ratio",
    "build_labels",
    "class_balance",
    "downloads_in_scope",
    "label_app",
    "sample_days",
]
