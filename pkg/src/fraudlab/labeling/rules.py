"""
Ground-truth labeling from the vendor flag.

An app is suspicious when more than ``threshold`` of its downloads come from
devices that are not vendor verified, normal when none do, and excluded in
between. Every download of a suspicious app is a positive record, including
the vendor-verified ones.

Ratios are compared as exact rationals: ``n_non_vendor / n_downloads`` is
compared with the decimal value of ``threshold`` (``0.5`` means exactly 1/2),
so 5 of 10 is not suspicious at the default threshold.
"""
import logging
from collections import defaultdict
from fractions import Fraction
from typing import Collection, Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple, Union

from fraudlab.core import ConfigError, DataError
from fraudlab.labeling.models import AppStatus, AppStatusRecord, Label, LabelRecord, LabelSet
from fraudlab.records.models import EventKind, EventRecord
from fraudlab.simulator.rng import stream

logger = logging.getLogger(__name__)

DAY = 86400


def app_suspicion_ratio(downloads: Sequence[EventRecord]) -> float:
    """
    Fraction of an app's downloads from devices that are not vendor verified.

    Raises:
        DataError: no downloads, the ratio is undefined
    """
    if not downloads:
        raise DataError("suspicion ratio is undefined for an app without downloads")
    return sum(1 for r in downloads if not r.vendor_verified) / len(downloads)


def app_status(n_non_vendor: int, n_downloads: int, threshold: Union[float, Fraction] = 0.5) -> AppStatus:
    """
    Status of an app from its counts, using exact rational comparison.
    """
    if n_downloads <= 0:
        raise DataError("app status is undefined for an app without downloads")
    if n_non_vendor == 0:
        return AppStatus.normal
    if Fraction(n_non_vendor, n_downloads) > Fraction(str(threshold)):
        return AppStatus.suspicious
    return AppStatus.excluded


_LABEL_OF = {AppStatus.suspicious: Label.pos, AppStatus.normal: Label.neg, AppStatus.excluded: Label.excluded}


def label_app(
    downloads: Sequence[EventRecord],
    threshold: Union[float, Fraction] = 0.5,
    fold_excluded: bool = False,
) -> Tuple[AppStatusRecord, List[LabelRecord]]:
    """
    Status of one app and the label of each of its download records.
    With ``fold_excluded`` the downloads of excluded apps become negatives.
    """
    n_non_vendor = sum(1 for r in downloads if not r.vendor_verified)
    status = app_status(n_non_vendor, len(downloads), threshold)
    label = _LABEL_OF[status]
    if fold_excluded and label == Label.excluded:
        label = Label.neg
    record = AppStatusRecord(
        app_id=downloads[0].app_id, status=status, n_downloads=len(downloads), n_non_vendor=n_non_vendor
    )
    return record, [LabelRecord(event_id=r.event_id, label=label) for r in downloads]


def utc_day(ts: int) -> int:
    return ts // DAY


def sample_days(log: Iterable[EventRecord], k: int, seed: int) -> List[int]:
    """
    Choose ``k`` whole UTC days (as days since the epoch) among the days
    holding at least one download, reproducibly from ``seed``.

    Raises:
        ConfigError: fewer than ``k`` days hold downloads
    """
    days = sorted({utc_day(r.ts) for r in log if r.kind == EventKind.download})
    if k > len(days):
        raise ConfigError(f"cannot sample {k} days from a log spanning {len(days)} download days")
    rng = stream(seed, "label-days")
    return sorted(int(d) for d in rng.choice(days, size=k, replace=False))


def downloads_in_scope(
    log: Iterable[EventRecord],
    window: Optional[Tuple[int, int]] = None,
    days: Optional[Collection[int]] = None,
    exclude_event_ids: Optional[Collection[int]] = None,
) -> List[EventRecord]:
    """
    Download records inside ``window`` (``[start, end)``), on one of ``days``
    and not excluded, in log order.
    """
    day_set = set(days) if days is not None else None
    excluded = set(exclude_event_ids or ())
    out = []
    for record in log:
        if record.kind != EventKind.download:
            continue
        if window is not None and not window[0] <= record.ts < window[1]:
            continue
        if day_set is not None and utc_day(record.ts) not in day_set:
            continue
        if record.event_id in excluded:
            continue
        out.append(record)
    return out


def build_labels(
    log: Sequence[EventRecord],
    threshold: Union[float, Fraction] = 0.5,
    window: Optional[Tuple[int, int]] = None,
    fold_excluded: bool = False,
    days: Optional[Collection[int]] = None,
    exclude_event_ids: Optional[Collection[int]] = None,
) -> LabelSet:
    """
    Label every download record in the window by the status of its app.

    Only ``download`` records are labeled. Without an explicit window the
    whole log span is used.
    """
    if window is None:
        window = (min(r.ts for r in log), max(r.ts for r in log) + 1) if log else (0, 0)
    by_app: Dict[str, List[EventRecord]] = defaultdict(list)
    for record in downloads_in_scope(log, window, days, exclude_event_ids):
        by_app[record.app_id].append(record)

    statuses: Dict[str, AppStatusRecord] = {}
    labels: List[LabelRecord] = []
    for app_id, downloads in by_app.items():
        statuses[app_id], app_labels = label_app(downloads, threshold, fold_excluded)
        labels.extend(app_labels)
    label_set = LabelSet.from_records(labels, statuses, window)
    logger.info(
        f"Labeled {len(labels)} downloads of {len(statuses)} apps: "
        f"{len(label_set.positive_event_ids)} pos, {len(label_set.negative_event_ids)} neg, "
        f"{len(label_set.excluded_event_ids)} excluded"
    )
    return label_set


class ClassBalance(NamedTuple):
    n_pos: int
    n_neg: int
    ratio: Optional[float]

    @property
    def defined(self) -> bool:
        return self.ratio is not None


def class_balance(label_set: LabelSet) -> ClassBalance:
    """
    Positive and negative counts and the positive share; the share is
    undefined (``None``) for a label set without positives or negatives.
    """
    n_pos = len(label_set.positive_event_ids)
    n_neg = len(label_set.negative_event_ids)
    total = n_pos + n_neg
    return ClassBalance(n_pos, n_neg, n_pos / total if total else None)
