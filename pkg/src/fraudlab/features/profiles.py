"""
Per-device, per-app and per-IP aggregate statistics.

Profiles are built from partial aggregates that merge exactly: hourly counts
add, first-seen timestamps take the minimum, distinct sets take the union.
Averages are derived from the merged integers only at the end, so profiles
built from any partition of a log are identical to a single pass.
"""
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Set, Tuple

from fraudlab.records.models import EventKind, EventRecord, Source

HOUR = 3600


def _hourly_stats(hours: Counter, active_hours: Set[int]) -> Tuple[int, float, int]:
    """Total, average per active hour and peak of hourly download counts."""
    total = sum(hours.values())
    active = len(active_hours)
    return total, (total / active if active else 0.0), max(hours.values(), default=0)


@dataclass
class DeviceAccumulator:
    first_seen_ts: Optional[int] = None
    hourly_downloads: Counter = field(default_factory=Counter)
    active_hours: Set[int] = field(default_factory=set)
    searches: int = 0
    views: int = 0
    apps: Set[str] = field(default_factory=set)
    ips: Set[str] = field(default_factory=set)

    def add(self, record: EventRecord):
        if self.first_seen_ts is None or record.ts < self.first_seen_ts:
            self.first_seen_ts = record.ts
        self.ips.add(record.ip_hash)
        self.active_hours.add(record.ts // HOUR)
        if record.kind == EventKind.download:
            self.hourly_downloads[record.ts // HOUR] += 1
            self.apps.add(record.app_id)
        elif record.kind == EventKind.search:
            self.searches += 1
        elif record.kind == EventKind.view:
            self.views += 1

    def merge(self, other: "DeviceAccumulator") -> "DeviceAccumulator":
        firsts = [t for t in (self.first_seen_ts, other.first_seen_ts) if t is not None]
        return DeviceAccumulator(
            first_seen_ts=min(firsts) if firsts else None,
            hourly_downloads=self.hourly_downloads + other.hourly_downloads,
            active_hours=self.active_hours | other.active_hours,
            searches=self.searches + other.searches,
            views=self.views + other.views,
            apps=self.apps | other.apps,
            ips=self.ips | other.ips,
        )

    def finish(self, device_id: str) -> "DeviceProfile":
        total, avg, peak = _hourly_stats(self.hourly_downloads, self.active_hours)
        return DeviceProfile(
            device_id=device_id,
            first_seen_ts=self.first_seen_ts if self.first_seen_ts is not None else 0,
            total_downloads=total,
            avg_downloads_per_hour=avg,
            max_downloads_per_hour=peak,
            total_searches=self.searches,
            total_views=self.views,
            distinct_apps=len(self.apps),
            distinct_ips=len(self.ips),
        )


@dataclass
class AppAccumulator:
    hourly_downloads: Counter = field(default_factory=Counter)
    active_hours: Set[int] = field(default_factory=set)
    client_downloads: int = 0
    installs: int = 0
    views: int = 0
    searches: int = 0

    def add(self, record: EventRecord):
        self.active_hours.add(record.ts // HOUR)
        if record.kind == EventKind.download:
            self.hourly_downloads[record.ts // HOUR] += 1
            if record.source == Source.client:
                self.client_downloads += 1
        elif record.kind == EventKind.install:
            self.installs += 1
        elif record.kind == EventKind.view:
            self.views += 1
        elif record.kind == EventKind.search:
            self.searches += 1

    def merge(self, other: "AppAccumulator") -> "AppAccumulator":
        return AppAccumulator(
            hourly_downloads=self.hourly_downloads + other.hourly_downloads,
            active_hours=self.active_hours | other.active_hours,
            client_downloads=self.client_downloads + other.client_downloads,
            installs=self.installs + other.installs,
            views=self.views + other.views,
            searches=self.searches + other.searches,
        )

    def finish(self, app_id: str) -> "AppProfile":
        total, avg, peak = _hourly_stats(self.hourly_downloads, self.active_hours)
        return AppProfile(
            app_id=app_id,
            total_downloads=total,
            avg_downloads_per_hour=avg,
            max_downloads_per_hour=peak,
            total_installs=self.installs,
            total_views=self.views,
            total_searches=self.searches,
            client_download_fraction=self.client_downloads / total if total else 0.0,
        )


@dataclass
class IpAccumulator:
    hourly_downloads: Counter = field(default_factory=Counter)
    devices: Set[str] = field(default_factory=set)

    def add(self, record: EventRecord):
        if record.kind == EventKind.download:
            self.hourly_downloads[record.ts // HOUR] += 1
            # records without a device ID count as one anonymous device
            self.devices.add(record.device_id)

    def merge(self, other: "IpAccumulator") -> "IpAccumulator":
        return IpAccumulator(
            hourly_downloads=self.hourly_downloads + other.hourly_downloads,
            devices=self.devices | other.devices,
        )

    def finish(self, ip_hash: str) -> "IpProfile":
        total = sum(self.hourly_downloads.values())
        peak = max(self.hourly_downloads.values(), default=0)
        return IpProfile(
            ip_hash=ip_hash,
            total_downloads=total,
            max_downloads_per_hour=peak,
            avg_downloads_per_device=total / len(self.devices) if self.devices else 0.0,
        )


@dataclass(frozen=True)
class DeviceProfile:
    device_id: str
    first_seen_ts: int
    total_downloads: int
    avg_downloads_per_hour: float
    max_downloads_per_hour: int
    total_searches: int
    total_views: int
    distinct_apps: int
    distinct_ips: int


@dataclass(frozen=True)
class AppProfile:
    app_id: str
    total_downloads: int
    avg_downloads_per_hour: float
    max_downloads_per_hour: int
    total_installs: int
    total_views: int
    total_searches: int
    client_download_fraction: float


@dataclass(frozen=True)
class IpProfile:
    ip_hash: str
    total_downloads: int
    max_downloads_per_hour: int
    avg_downloads_per_device: float


@dataclass
class PartialProfiles:
    """
    Mergeable aggregates of a subset of the events. ``merge`` is associative
    and commutative, and the empty instance is its identity.
    """

    devices: Dict[str, DeviceAccumulator] = field(default_factory=dict)
    apps: Dict[str, AppAccumulator] = field(default_factory=dict)
    ips: Dict[str, IpAccumulator] = field(default_factory=dict)

    def add(self, record: EventRecord):
        if record.device_id:
            self.devices.setdefault(record.device_id, DeviceAccumulator()).add(record)
        self.apps.setdefault(record.app_id, AppAccumulator()).add(record)
        self.ips.setdefault(record.ip_hash, IpAccumulator()).add(record)

    def merge(self, other: "PartialProfiles") -> "PartialProfiles":
        return PartialProfiles(
            devices=_merge_maps(self.devices, other.devices),
            apps=_merge_maps(self.apps, other.apps),
            ips=_merge_maps(self.ips, other.ips),
        )

    def finish(self) -> "EntityProfiles":
        return EntityProfiles(
            devices={k: self.devices[k].finish(k) for k in sorted(self.devices)},
            apps={k: self.apps[k].finish(k) for k in sorted(self.apps)},
            ips={k: self.ips[k].finish(k) for k in sorted(self.ips)},
        )


def _merge_maps(left: Dict, right: Dict) -> Dict:
    merged = dict(left)
    for key, acc in right.items():
        merged[key] = merged[key].merge(acc) if key in merged else acc
    return merged


@dataclass(frozen=True)
class EntityProfiles:
    """Finished profiles keyed by device_id, app_id and ip_hash, in sorted key order."""

    devices: Dict[str, DeviceProfile] = field(default_factory=dict)
    apps: Dict[str, AppProfile] = field(default_factory=dict)
    ips: Dict[str, IpProfile] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.devices) + len(self.apps) + len(self.ips)


def in_window(record: EventRecord, window: Optional[Tuple[int, int]]) -> bool:
    return window is None or window[0] <= record.ts < window[1]


def aggregate(records: Iterable[EventRecord], window: Optional[Tuple[int, int]] = None) -> PartialProfiles:
    """
    Partial profiles of the records inside ``window`` (``[start, end)``).
    """
    partial = PartialProfiles()
    for record in records:
        if in_window(record, window):
            partial.add(record)
    return partial


def merge_partials(partials: Iterable[PartialProfiles]) -> PartialProfiles:
    merged = PartialProfiles()
    for partial in partials:
        merged = merged.merge(partial)
    return merged


def build_profiles(log: Iterable[EventRecord], window: Optional[Tuple[int, int]] = None) -> EntityProfiles:
    """
    Entity profiles over the events in ``window``; the whole log without one.

    Hourly statistics bucket downloads by UTC hour. Averages are taken over
    active hours: hours with at least one event of any kind of the entity.
    """
    return aggregate(log, window).finish()


def partition_by_entity(records: Iterable[EventRecord], n_parts: int) -> List[List[EventRecord]]:
    """
    Split records into ``n_parts`` lists by a stable hash of the app_id.
    Any partition merges to the same profiles; this one keeps each app whole.
    """
    parts: List[List[EventRecord]] = [[] for _ in range(n_parts)]
    for record in records:
        parts[sum(record.app_id.encode("utf-8")) % n_parts].append(record)
    return parts
