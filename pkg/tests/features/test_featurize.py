import pytest

from fraudlab.core import DataError
from fraudlab.features import FEATURE_NAMES, build_profiles, featurize, select_feature_set
from fraudlab.records import AppCatalogEntry, EventKind, EventRecord, Source

DAY = 86400
DEVICE = "00000000000000a1"
IP = "00000000000000ff"


def event(event_id, ts, kind=EventKind.download, device=DEVICE, app="app_0", source=Source.client, verified=None):
    return EventRecord(
        event_id=event_id,
        ts=ts,
        kind=kind,
        device_id=device,
        vendor_verified=bool(device) if verified is None else verified,
        app_id=app,
        ip_hash=IP,
        source=source,
    )


@pytest.fixture()
def catalog():
    return {
        "app_0": AppCatalogEntry(app_id="app_0", category="Game", rating=4.5, release_ts=10 * DAY),
        "app_1": AppCatalogEntry(app_id="app_1", category="Finance", rating=2.0, release_ts=0),
    }


def test_featurize(catalog):
    log = [event(0, 10 * DAY, kind=EventKind.view), event(1, 12 * DAY), event(2, 20 * DAY)]
    profiles = build_profiles(log)

    vector = featurize(log[1], profiles, catalog)
    assert vector.names == FEATURE_NAMES
    assert vector.event_id == 1
    assert vector["is_new_device"] == 1
    assert vector["is_new_app"] == 1
    assert vector["app_category"] == 1
    assert vector["app_rating"] == 4.5
    assert vector["device_total_downloads"] == 2
    assert vector["device_total_views"] == 1
    assert vector["app_client_download_fraction"] == 1.0

    later = featurize(log[2], profiles, catalog)
    assert later["is_new_device"] == 0
    assert later["is_new_app"] == 0


def test_record_without_device(catalog):
    record = event(0, 12 * DAY, device="", source=Source.portal)
    vector = featurize(record, build_profiles([record]), catalog)
    assert vector["is_new_device"] == 1
    assert vector["device_total_downloads"] == 0
    assert vector["device_distinct_ips"] == 0
    assert vector["app_client_download_fraction"] == 0.0
    assert vector["ip_avg_downloads_per_device"] == 1.0


def test_featurize_errors(catalog):
    profiles = build_profiles([])
    with pytest.raises(DataError, match="only download records"):
        featurize(event(0, 0, kind=EventKind.search), profiles, catalog)
    with pytest.raises(DataError, match="missing from the catalog"):
        featurize(event(0, 0, app="app_9"), profiles, catalog)
    with pytest.raises(DataError, match="outside the profile window"):
        featurize(event(0, 50), profiles, catalog, window=(100, 200))


def test_select_feature_set(catalog):
    record = event(0, 12 * DAY)
    vector = featurize(record, build_profiles([record]), catalog)
    device = select_feature_set(vector, "device")
    assert len(device.names) == 8
    assert device.as_dict()["is_new_device"] == 1
    with pytest.raises(DataError):
        select_feature_set(device, "new")


def test_features_ignore_vendor_flag(small_run):
    """Flipping every vendor flag leaves every feature value unchanged"""
    log = small_run.events
    flipped = [r.model_copy(update={"vendor_verified": False}) for r in log]
    original, unverified = build_profiles(log), build_profiles(flipped)
    assert original == unverified

    downloads = [(a, b) for a, b in zip(log, flipped) if a.kind == EventKind.download][:500]
    for a, b in downloads:
        assert featurize(a, original, small_run.catalog) == featurize(b, unverified, small_run.catalog)
