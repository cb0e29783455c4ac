"""Event-log, catalog and ground-truth records and their CSV files."""
from fraudlab.records.codec import (
    CATALOG_CODEC,
    EVENT_CODEC,
    GROUND_TRUTH_CODEC,
    RecordCodec,
    parse_catalog,
    parse_ground_truth,
    parse_log,
    write_catalog,
    write_ground_truth,
    write_log,
)
from fraudlab.records.models import (
    NEW_HORIZON_SECONDS,
    AppCatalogEntry,
    Category,
    EventKind,
    EventRecord,
    FraudType,
    GroundTruthEntry,
    Source,
)

LOG_FORMAT_VERSION = 1

__all__ = [
    "CATALOG_CODEC",
    "EVENT_CODEC",
    "GROUND_TRUTH_CODEC",
    "LOG_FORMAT_VERSION",
    "NEW_HORIZON_SECONDS",
    "AppCatalogEntry",
    "Category",
    "EventKind",
    "EventRecord",
    "FraudType",
    "GroundTruthEntry",
    "RecordCodec",
    "Source",
    "parse_catalog",
    "parse_ground_truth",
    "parse_log",
    "write_catalog",
    "write_ground_truth",
    "write_log",
]
