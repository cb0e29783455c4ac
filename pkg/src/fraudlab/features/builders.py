"""
Profile aggregation and featurization as Builders.
"""
from typing import Any, Dict, Iterator, List, Optional, Tuple

from fraudlab.builders import MapBuilder
from fraudlab.core import Builder, DataError, Store
from fraudlab.features.featurize import feature_values
from fraudlab.features.matrix import LABEL_CODES, FeatureMatrix, matrix_from_rows
from fraudlab.features.profiles import (
    AppProfile,
    DeviceProfile,
    EntityProfiles,
    IpProfile,
    PartialProfiles,
    aggregate,
)
from fraudlab.labeling.models import Label
from fraudlab.records.models import EventRecord

_PROFILE_TYPES = {"device": DeviceProfile, "app": AppProfile, "ip": IpProfile}


def window_query(window: Optional[Tuple[int, int]], **criteria) -> Dict:
    if window is not None:
        criteria["ts"] = {"$gte": window[0], "$lt": window[1]}
    return criteria


def profiles_to_docs(profiles: EntityProfiles) -> List[Dict]:
    docs: List[Dict] = []
    for entity, table in (("device", profiles.devices), ("app", profiles.apps), ("ip", profiles.ips)):
        docs.extend({"entity": entity, "entity_id": key, "profile": value} for key, value in table.items())
    return docs


def profiles_from_store(store: Store) -> EntityProfiles:
    tables: Dict[str, Dict[str, Any]] = {"device": {}, "app": {}, "ip": {}}
    for doc in store.query():
        if not isinstance(doc["profile"], _PROFILE_TYPES[doc["entity"]]):
            raise DataError(f"profile store holds a {type(doc['profile']).__name__} under {doc['entity']!r}")
        tables[doc["entity"]][doc["entity_id"]] = doc["profile"]
    return EntityProfiles(
        devices=dict(sorted(tables["device"].items())),
        apps=dict(sorted(tables["app"].items())),
        ips=dict(sorted(tables["ip"].items())),
    )


class ProfileBuilder(Builder):
    """
    Aggregate entity profiles from an event store.

    Events are partitioned by app; each partition is aggregated on its own
    and the partial profiles are merged as they come back. Merging is exact,
    so the profiles do not depend on partitioning, worker count or arrival
    order.
    """

    def __init__(self, events: Store, profiles: Store, window: Optional[Tuple[int, int]] = None, **kwargs):
        """
        Args:
            events: event-log store
            profiles: target store, keyed by ``["entity", "entity_id"]``
            window: ``[start, end)`` of the aggregated events; everything if None
        """
        self.events = events
        self.profiles = profiles
        self.window = tuple(window) if window is not None else None
        self.kwargs = kwargs
        self._partial = PartialProfiles()
        super().__init__(sources=[events], targets=[profiles], **kwargs)

    def get_items(self) -> Iterator[List[EventRecord]]:
        self.logger.info("Starting ProfileBuilder")
        self._partial = PartialProfiles()
        partitions = [docs for _, docs in self.events.groupby("app_id", criteria=window_query(self.window))]
        self.total = len(partitions)
        self.logger.info(f"Aggregating {sum(len(p) for p in partitions)} events in {self.total} partitions")
        yield from partitions

    def process_item(self, item: List[EventRecord]) -> PartialProfiles:
        return aggregate(item, self.window)

    def update_targets(self, items: List[PartialProfiles]):
        for partial in items:
            self._partial = self._partial.merge(partial)

    @property
    def result(self) -> EntityProfiles:
        return self._partial.finish()

    def finalize(self):
        profiles = self.result
        self.profiles.update(profiles_to_docs(profiles), key=["entity", "entity_id"])
        self.logger.info(
            f"Built profiles for {len(profiles.devices)} devices, {len(profiles.apps)} apps, {len(profiles.ips)} IPs"
        )
        super().finalize()


class FeatureBuilder(MapBuilder):
    """
    Featurize the labeled downloads of an event store against read-only
    profiles and catalog.

    Every item carries its record together with the profiles and catalog
    entry it joins to, so a worker process needs nothing else.
    """

    def __init__(
        self,
        events: Store,
        catalog: Store,
        labels: Store,
        profiles: Store,
        matrix: Store,
        **kwargs,
    ):
        """
        Args:
            events: event-log store
            catalog: app catalog store
            labels: label store (``event_id,label``); only pos and neg rows are featurized
            profiles: entity profiles, as written by ProfileBuilder
            matrix: target store for feature rows, keyed by event_id
        """
        self.events = events
        self.catalog = catalog
        self.labels = labels
        self.profiles = profiles
        self.matrix = matrix
        super().__init__(source=events, target=matrix, query={"kind": "download"}, **kwargs)
        self.sources.extend([catalog, labels, profiles])

    def get_items(self) -> Iterator[Dict]:
        self.logger.info("Starting FeatureBuilder")
        catalog = {entry.app_id: entry for entry in self.catalog.query()}
        labels = {doc.event_id: doc.label for doc in self.labels.query() if doc.label in LABEL_CODES}
        profiles = profiles_from_store(self.profiles)
        records = [r for r in self.events.query(criteria=self.query) if r.event_id in labels]
        self.total = len(records)
        self.logger.info(f"Featurizing {self.total} labeled downloads")
        for record in records:
            entry = catalog.get(record.app_id)
            if entry is None:
                raise DataError(f"app {record.app_id} is missing from the catalog")
            yield {
                "record": record,
                "label": labels[record.event_id],
                "device": profiles.devices.get(record.device_id) if record.device_id else None,
                "app": profiles.apps.get(record.app_id),
                "ip": profiles.ips.get(record.ip_hash),
                "entry": entry,
            }

    def unary_function(self, item: Dict) -> Dict:
        record: EventRecord = item["record"]
        label: Label = item["label"]
        return {
            "event_id": record.event_id,
            "app_id": record.app_id,
            "values": feature_values(record, item["device"], item["app"], item["ip"], item["entry"]),
            "label": LABEL_CODES[label],
        }

    def to_matrix(self, set_name: str = "all") -> FeatureMatrix:
        """
        The featurized rows as a matrix, sorted by event_id.
        """
        rows = [(d["event_id"], d["app_id"], d["values"], d["label"]) for d in self.matrix.query()]
        return matrix_from_rows(rows, set_name)
