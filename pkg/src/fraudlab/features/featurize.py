"""
Feature vectors of download records.
"""
from dataclasses import dataclass
from typing import Dict, Mapping, Optional, Tuple

from fraudlab.core import DataError
from fraudlab.features.profiles import AppProfile, DeviceProfile, EntityProfiles, IpProfile
from fraudlab.features.registry import FEATURE_NAMES, FEATURES, feature_set_columns
from fraudlab.records.models import NEW_HORIZON_SECONDS, AppCatalogEntry, EventKind, EventRecord


@dataclass(frozen=True)
class FeatureVector:
    """The features of one download record, in ``names`` order."""

    event_id: int
    app_id: str
    names: Tuple[str, ...]
    values: Tuple[float, ...]

    def __getitem__(self, name: str) -> float:
        return self.values[self.names.index(name)]

    def as_dict(self) -> Dict[str, float]:
        return dict(zip(self.names, self.values))


def feature_values(
    record: EventRecord,
    device: Optional[DeviceProfile],
    app: Optional[AppProfile],
    ip: Optional[IpProfile],
    entry: AppCatalogEntry,
) -> Tuple[float, ...]:
    """
    Registry-ordered feature values from already-joined profiles. A missing
    device profile (no device ID) reads as a never-seen device.
    """
    if device is None:
        is_new_device = True
        device_stats = (0, 0.0, 0, 0, 0, 0, 0)
    else:
        is_new_device = record.ts - device.first_seen_ts < NEW_HORIZON_SECONDS
        device_stats = (
            device.total_downloads,
            device.avg_downloads_per_hour,
            device.max_downloads_per_hour,
            device.total_searches,
            device.total_views,
            device.distinct_apps,
            device.distinct_ips,
        )
    if app is None:
        app_stats = (0, 0.0, 0, 0, 0, 0, 0.0)
    else:
        app_stats = (
            app.total_downloads,
            app.avg_downloads_per_hour,
            app.max_downloads_per_hour,
            app.total_installs,
            app.total_views,
            app.total_searches,
            app.client_download_fraction,
        )
    if ip is None:
        ip_stats = (0, 0, 0.0)
    else:
        ip_stats = (ip.total_downloads, ip.max_downloads_per_hour, ip.avg_downloads_per_device)
    is_new_app = record.ts - entry.release_ts < NEW_HORIZON_SECONDS
    values = (
        (int(is_new_device),)
        + device_stats
        + (int(is_new_app), entry.category.code, entry.rating)
        + app_stats
        + ip_stats
    )
    if len(values) != len(FEATURES):
        raise AssertionError(f"feature vector has {len(values)} values, registry has {len(FEATURES)}")
    return values


def featurize(
    record: EventRecord,
    profiles: EntityProfiles,
    catalog: Mapping[str, AppCatalogEntry],
    window: Optional[Tuple[int, int]] = None,
) -> FeatureVector:
    """
    The full feature vector of one download record.

    Joins are by exact id; the vendor flag is never read.

    Raises:
        DataError: the record is not a download, lies outside ``window`` or
            its app is missing from the catalog
    """
    if record.kind != EventKind.download:
        raise DataError(f"only download records are featurized, event {record.event_id} is a {record.kind.value}")
    if window is not None and not window[0] <= record.ts < window[1]:
        raise DataError(f"event {record.event_id} lies outside the profile window")
    entry = catalog.get(record.app_id)
    if entry is None:
        raise DataError(f"app {record.app_id} is missing from the catalog")
    values = feature_values(
        record,
        profiles.devices.get(record.device_id) if record.device_id else None,
        profiles.apps.get(record.app_id),
        profiles.ips.get(record.ip_hash),
        entry,
    )
    return FeatureVector(event_id=record.event_id, app_id=record.app_id, names=FEATURE_NAMES, values=values)


def select_feature_set(vector: FeatureVector, set_name: str) -> FeatureVector:
    """
    Project a full feature vector onto one feature set.

    Raises:
        DataError: unknown set name
    """
    if vector.names != FEATURE_NAMES:
        raise DataError("only full feature vectors can be projected")
    columns = feature_set_columns(set_name)
    return FeatureVector(
        event_id=vector.event_id,
        app_id=vector.app_id,
        names=tuple(FEATURE_NAMES[c] for c in columns),
        values=tuple(vector.values[c] for c in columns),
    )
