"""
The feature registry: name, order and tags of every exported feature.

Each feature has exactly one entity tag (device, app or ip) and exactly one
origin tag (new or previous). The registry order is the column order of
every feature matrix.
"""
from enum import Enum
from typing import Dict, List, NamedTuple, Tuple

from fraudlab.core import DataError
from fraudlab.records.models import Category

FEATURE_REGISTRY_VERSION = 1


class Entity(str, Enum):
    device = "device"
    app = "app"
    ip = "ip"


class Origin(str, Enum):
    new = "new"
    previous = "previous"


class FeatureSpec(NamedTuple):
    """
    One registered feature.

    ``inputs`` names the event-record fields the feature is computed from;
    the registry refuses any feature reading the vendor flag.
    """

    name: str
    entity: Entity
    origin: Origin
    dtype: str
    inputs: Tuple[str, ...]
    description: str


_D, _A, _I = Entity.device, Entity.app, Entity.ip
_NEW, _PREV = Origin.new, Origin.previous

FEATURES: Tuple[FeatureSpec, ...] = (
    FeatureSpec("is_new_device", _D, _NEW, "bool", ("device_id", "ts"), "device first seen within a week"),
    FeatureSpec("device_total_downloads", _D, _PREV, "int", ("device_id", "kind"), "downloads by the device"),
    FeatureSpec(
        "device_avg_downloads_per_hour", _D, _PREV, "float", ("device_id", "kind", "ts"), "per active hour"
    ),
    FeatureSpec("device_max_downloads_per_hour", _D, _PREV, "int", ("device_id", "kind", "ts"), "busiest hour"),
    FeatureSpec("device_total_searches", _D, _NEW, "int", ("device_id", "kind"), "searches by the device"),
    FeatureSpec("device_total_views", _D, _NEW, "int", ("device_id", "kind"), "app views by the device"),
    FeatureSpec("device_distinct_apps", _D, _PREV, "int", ("device_id", "kind", "app_id"), "apps downloaded"),
    FeatureSpec("device_distinct_ips", _D, _PREV, "int", ("device_id", "ip_hash"), "addresses used"),
    FeatureSpec("is_new_app", _A, _NEW, "bool", ("app_id", "ts"), "app released within a week"),
    FeatureSpec("app_category", _A, _PREV, "int", ("app_id",), "category code"),
    FeatureSpec("app_rating", _A, _PREV, "float", ("app_id",), "catalog rating"),
    FeatureSpec("app_total_downloads", _A, _PREV, "int", ("app_id", "kind"), "downloads of the app"),
    FeatureSpec("app_avg_downloads_per_hour", _A, _PREV, "float", ("app_id", "kind", "ts"), "per active hour"),
    FeatureSpec("app_max_downloads_per_hour", _A, _PREV, "int", ("app_id", "kind", "ts"), "busiest hour"),
    FeatureSpec("app_total_installs", _A, _PREV, "int", ("app_id", "kind"), "installs of the app"),
    FeatureSpec("app_total_views", _A, _NEW, "int", ("app_id", "kind"), "views of the app"),
    FeatureSpec("app_total_searches", _A, _NEW, "int", ("app_id", "kind"), "searches leading to the app"),
    FeatureSpec(
        "app_client_download_fraction", _A, _NEW, "float", ("app_id", "kind", "source"), "downloads via the client"
    ),
    FeatureSpec("ip_total_downloads", _I, _PREV, "int", ("ip_hash", "kind"), "downloads from the address"),
    FeatureSpec("ip_max_downloads_per_hour", _I, _PREV, "int", ("ip_hash", "kind", "ts"), "busiest hour"),
    FeatureSpec(
        "ip_avg_downloads_per_device", _I, _PREV, "float", ("ip_hash", "kind", "device_id"), "per distinct device"
    ),
)

FEATURE_NAMES: Tuple[str, ...] = tuple(f.name for f in FEATURES)

# the ablation sets; "ip" is selectable as well
FEATURE_SETS: Tuple[str, ...] = ("device", "app", "new", "previous", "all")

CATEGORY_CODES: Dict[str, int] = {c.value: c.code for c in Category}


def check_registry(features: Tuple[FeatureSpec, ...] = FEATURES):
    """
    Registry sanity: unique names and no feature computed from the vendor flag.
    """
    names = [f.name for f in features]
    if len(set(names)) != len(names):
        raise DataError("duplicate feature names in the registry")
    leaking = [f.name for f in features if "vendor_verified" in f.inputs]
    if leaking:
        raise DataError(f"features must not read vendor_verified: {', '.join(leaking)}")


check_registry()


def feature_set_columns(set_name: str, features: Tuple[FeatureSpec, ...] = FEATURES) -> List[int]:
    """
    Column indices of a feature set, in registry order.

    Raises:
        DataError: unknown set name
    """
    if set_name == "all":
        return list(range(len(features)))
    if set_name in Entity.__members__:
        return [i for i, f in enumerate(features) if f.entity == Entity(set_name)]
    if set_name in Origin.__members__:
        return [i for i, f in enumerate(features) if f.origin == Origin(set_name)]
    raise DataError(f"unknown feature set {set_name!r}; known: {', '.join(FEATURE_SETS)}, ip")
