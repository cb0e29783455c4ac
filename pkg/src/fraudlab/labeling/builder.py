"""
Labeling as a per-app GroupBuilder.
"""
from typing import Dict, Iterator, List, Optional, Tuple

from fraudlab.builders import GroupBuilder
from fraudlab.core import Store
from fraudlab.labeling.models import AppStatusRecord, LabelRecord
from fraudlab.labeling.rules import label_app, utc_day
from fraudlab.records.models import EventRecord


class LabelBuilder(GroupBuilder):
    """
    Group the download records of an event store by app and label each group.

    Apps are independent, so groups can be labeled in any order or in parallel;
    the label and app-status stores sort on flush.
    """

    def __init__(
        self,
        events: Store,
        labels: Store,
        app_status: Store,
        threshold: float = 0.5,
        window: Optional[Tuple[int, int]] = None,
        fold_excluded: bool = False,
        days: Optional[List[int]] = None,
        flags: Optional[Store] = None,
        **kwargs,
    ):
        """
        Args:
            events: event-log store
            labels: target store for ``event_id,label`` records
            app_status: target store for per-app status records
            threshold: non-vendor share above which an app is suspicious
            window: ``[start, end)`` of labeled download timestamps
            fold_excluded: label the downloads of excluded apps negative
            days: keep only downloads on these UTC days (days since the epoch)
            flags: type-1 filter output; flagged records are dropped before
                apps are scored
        """
        self.events = events
        self.labels = labels
        self.app_status = app_status
        self.threshold = threshold
        self.window = tuple(window) if window is not None else None
        self.fold_excluded = fold_excluded
        self.days = sorted(days) if days is not None else None
        self.flags = flags

        query: Dict = {"kind": "download"}
        if self.window is not None:
            query["ts"] = {"$gte": self.window[0], "$lt": self.window[1]}
        super().__init__(source=events, target=labels, grouping_keys=["app_id"], query=query, **kwargs)
        self.targets.append(app_status)
        if flags is not None:
            self.sources.append(flags)

    def get_groups(self) -> Iterator[List[EventRecord]]:
        excluded = set(self.flags.distinct("event_id")) if self.flags is not None else set()
        if excluded:
            self.logger.info(f"Dropping {len(excluded)} records flagged by the type-1 filter")
        days = set(self.days) if self.days is not None else None
        for downloads in super().get_groups():
            kept = [
                r
                for r in downloads
                if r.event_id not in excluded and (days is None or utc_day(r.ts) in days)
            ]
            if kept:
                yield kept

    def unary_function(self, items: List[EventRecord]) -> Tuple[AppStatusRecord, List[LabelRecord]]:  # type: ignore
        return label_app(items, self.threshold, self.fold_excluded)

    def update_targets(self, items: List[Tuple[AppStatusRecord, List[LabelRecord]]]):  # type: ignore
        if not items:
            return
        self.app_status.update([status for status, _ in items])
        self.labels.update([label for _, labels in items for label in labels])
        self.logger.debug(f"Labeled {len(items)} apps")
