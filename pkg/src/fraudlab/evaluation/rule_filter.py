"""
Rule filter for type-1 fraud.

Download farms leave signatures no regular client produces: downloads from
the portal site or with no source at all, downloads without a device ID,
and bursts of app updates from many devices within one hour.
"""
import logging
from collections import Counter, defaultdict
from enum import Enum
from typing import Any, Dict, Iterable, List, Optional, Sequence, Set, Tuple

from pydantic import BaseModel, ConfigDict, Field

from fraudlab.records.codec import RecordCodec, convert_field, parse_uint
from fraudlab.records.models import EventKind, EventRecord, FraudType, GroundTruthEntry, Source

logger = logging.getLogger(__name__)


class FilterReason(str, Enum):
    """Why a record was flagged, in priority order."""

    portal_source = "portal_source"
    null_source = "null_source"
    missing_device_id = "missing_device_id"
    update_burst = "update_burst"


class FlagRecord(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    event_id: int = Field(..., ge=0, lt=2**64)
    reason: FilterReason


class FlagCodec(RecordCodec[FlagRecord]):
    header = ("event_id", "reason")
    key = "event_id"
    model = FlagRecord

    def to_fields(self, record: FlagRecord) -> Sequence[str]:
        return (str(record.event_id), record.reason.value)

    def from_fields(self, row: Dict[str, str]) -> Dict[str, Any]:
        return {"event_id": convert_field(row, "event_id", parse_uint), "reason": row["reason"]}


FLAG_CODEC = FlagCodec()


class FilterConfig(BaseModel):
    """
    ``update_burst_threshold`` is the number of distinct devices updating one
    app within one ``burst_window_seconds`` bucket above which every update
    in the bucket is flagged.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    update_burst_threshold: int = Field(100, ge=1)
    burst_window_seconds: int = Field(3600, ge=1)


def _burst_buckets(log: Iterable[EventRecord], config: FilterConfig) -> Set[Tuple[str, int]]:
    devices: Dict[Tuple[str, int], Set[str]] = defaultdict(set)
    for record in log:
        if record.kind == EventKind.update:
            devices[(record.app_id, record.ts // config.burst_window_seconds)].add(record.device_id)
    return {bucket for bucket, ids in devices.items() if len(ids) > config.update_burst_threshold}


def flag_reason(record: EventRecord, bursts: Set[Tuple[str, int]], config: FilterConfig):
    """The first rule a download or update record breaks, or None."""
    if record.kind not in (EventKind.download, EventKind.update):
        return None
    if record.source == Source.portal:
        return FilterReason.portal_source
    if record.source == Source.null:
        return FilterReason.null_source
    if not record.device_id:
        return FilterReason.missing_device_id
    if record.kind == EventKind.update and (record.app_id, record.ts // config.burst_window_seconds) in bursts:
        return FilterReason.update_burst
    return None


def type1_rule_filter(log: Sequence[EventRecord], config: Optional[FilterConfig] = None) -> List[FlagRecord]:
    """
    Flag the records of a log that carry a download-farm signature, sorted
    by event_id. Each flagged record gets the first reason that applies.
    """
    config = config or FilterConfig()
    bursts = _burst_buckets(log, config)
    flags = []
    for record in log:
        reason = flag_reason(record, bursts, config)
        if reason is not None:
            flags.append(FlagRecord(event_id=record.event_id, reason=reason))
    flags.sort(key=lambda f: f.event_id)
    counts = Counter(f.reason.value for f in flags)
    logger.info(f"Flagged {len(flags)} records: {dict(sorted(counts.items()))}")
    return flags


def filter_hits(flags: Iterable[FlagRecord]) -> Dict[str, int]:
    """Number of flagged records per reason, every reason present."""
    counts = Counter(f.reason for f in flags)
    return {reason.value: counts.get(reason, 0) for reason in FilterReason}


def filter_quality(flags: Iterable[FlagRecord], ground_truth: Iterable[GroundTruthEntry]) -> Dict[str, Any]:
    """
    Precision and recall of the flags against simulated type-1 ground truth.
    Undefined values are None.
    """
    flagged = {f.event_id for f in flags}
    type1 = {g.event_id for g in ground_truth if g.fraud_type == FraudType.type1}
    hits = len(flagged & type1)
    return {
        "flagged": len(flagged),
        "type1": len(type1),
        "true_positives": hits,
        "precision": hits / len(flagged) if flagged else None,
        "recall": hits / len(type1) if type1 else None,
    }
