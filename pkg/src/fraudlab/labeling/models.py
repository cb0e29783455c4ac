"""
Label records, their CSV files and the labeling configuration.
"""
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, FrozenSet, Mapping, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from fraudlab.records.codec import RecordCodec, convert_field, parse_uint
from fraudlab.records.models import TOKEN


class Label(str, Enum):
    """Training label of one download record."""

    pos = "pos"
    neg = "neg"
    excluded = "excluded"


class AppStatus(str, Enum):
    """Ground-truth status of one app."""

    suspicious = "suspicious"
    normal = "normal"
    excluded = "excluded"


class LabelRecord(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    event_id: int = Field(..., ge=0, lt=2**64)
    label: Label


class AppStatusRecord(BaseModel):
    """Status of one app with the download counts it was derived from."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    app_id: str = Field(..., pattern=TOKEN)
    status: AppStatus
    n_downloads: int = Field(..., ge=1)
    n_non_vendor: int = Field(..., ge=0)

    @model_validator(mode="after")
    def check_counts(self) -> "AppStatusRecord":
        if self.n_non_vendor > self.n_downloads:
            raise ValueError("n_non_vendor exceeds n_downloads")
        return self

    @property
    def ratio(self) -> float:
        return self.n_non_vendor / self.n_downloads


class LabelCodec(RecordCodec[LabelRecord]):
    header = ("event_id", "label")
    key = "event_id"
    model = LabelRecord

    def to_fields(self, record: LabelRecord) -> Sequence[str]:
        return (str(record.event_id), record.label.value)

    def from_fields(self, row: Dict[str, str]) -> Dict[str, Any]:
        return {"event_id": convert_field(row, "event_id", parse_uint), "label": row["label"]}


class AppStatusCodec(RecordCodec[AppStatusRecord]):
    header = ("app_id", "status", "n_downloads", "n_non_vendor")
    key = "app_id"
    model = AppStatusRecord

    def to_fields(self, record: AppStatusRecord) -> Sequence[str]:
        return (record.app_id, record.status.value, str(record.n_downloads), str(record.n_non_vendor))

    def from_fields(self, row: Dict[str, str]) -> Dict[str, Any]:
        return {
            "app_id": row["app_id"],
            "status": row["status"],
            "n_downloads": convert_field(row, "n_downloads", parse_uint),
            "n_non_vendor": convert_field(row, "n_non_vendor", parse_uint),
        }


LABEL_CODEC = LabelCodec()
APP_STATUS_CODEC = AppStatusCodec()


@dataclass(frozen=True)
class LabelSet:
    """
    Labels of the download records inside ``window`` (``[start, end)``, the
    whole log when unknown). The three event-id sets are pairwise disjoint.
    """

    positive_event_ids: FrozenSet[int]
    negative_event_ids: FrozenSet[int]
    excluded_event_ids: FrozenSet[int]
    app_status: Mapping[str, AppStatusRecord]
    window: Optional[Tuple[int, int]] = None

    def label_of(self, event_id: int) -> Optional[Label]:
        if event_id in self.positive_event_ids:
            return Label.pos
        if event_id in self.negative_event_ids:
            return Label.neg
        if event_id in self.excluded_event_ids:
            return Label.excluded
        return None

    def records(self):
        """Label records sorted by event_id."""
        labels = [(e, Label.pos) for e in self.positive_event_ids]
        labels += [(e, Label.neg) for e in self.negative_event_ids]
        labels += [(e, Label.excluded) for e in self.excluded_event_ids]
        return [LabelRecord(event_id=e, label=label) for e, label in sorted(labels)]

    @classmethod
    def from_records(
        cls,
        labels: Sequence[LabelRecord],
        app_status: Optional[Mapping[str, AppStatusRecord]] = None,
        window: Optional[Tuple[int, int]] = None,
    ) -> "LabelSet":
        by_label: Dict[Label, set] = {label: set() for label in Label}
        for record in labels:
            by_label[record.label].add(record.event_id)
        return cls(
            positive_event_ids=frozenset(by_label[Label.pos]),
            negative_event_ids=frozenset(by_label[Label.neg]),
            excluded_event_ids=frozenset(by_label[Label.excluded]),
            app_status=dict(app_status or {}),
            window=window,
        )


class LabelingConfig(BaseModel):
    """
    Labeling options.

    ``sample_days`` keeps k whole UTC days chosen with ``seed``;
    ``prefilter_type1`` drops records flagged by the type-1 rule filter
    before apps are scored.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    threshold: float = Field(0.5, ge=0, lt=1)
    window_start: Optional[int] = Field(None, ge=0)
    window_end: Optional[int] = Field(None, ge=0)
    fold_excluded: bool = False
    sample_days: Optional[int] = Field(None, ge=1)
    prefilter_type1: bool = False
    seed: int = Field(0, ge=0, lt=2**64)

    @property
    def window(self) -> Optional[Tuple[int, int]]:
        if self.window_start is None and self.window_end is None:
            return None
        return (self.window_start or 0, self.window_end if self.window_end is not None else 2**63)
