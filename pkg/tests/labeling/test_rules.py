from collections import defaultdict
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from fraudlab.core import ConfigError, DataError
from fraudlab.labeling import (
    AppStatus,
    Label,
    LabelSet,
    app_status,
    app_suspicion_ratio,
    build_labels,
    class_balance,
    downloads_in_scope,
    label_app,
    sample_days,
)
from fraudlab.records import EventKind, EventRecord, Source

DEVICE = "00000000000000a1"
IP = "00000000000000ff"


def download(event_id, app_id="app_0", verified=True, ts=None, kind=EventKind.download):
    return EventRecord(
        event_id=event_id,
        ts=event_id * 60 if ts is None else ts,
        kind=kind,
        device_id=DEVICE,
        vendor_verified=verified,
        app_id=app_id,
        ip_hash=IP,
        source=Source.update if kind == EventKind.update else Source.client,
    )


@pytest.mark.parametrize(
    ("n_non_vendor", "n_downloads", "threshold", "status"),
    [
        (0, 10, 0.5, AppStatus.normal),
        (5, 10, 0.5, AppStatus.excluded),
        (6, 10, 0.5, AppStatus.suspicious),
        (10, 10, 0.5, AppStatus.suspicious),
        (1, 10, 0.5, AppStatus.excluded),
        (1, 3, 0.333, AppStatus.suspicious),
        (1, 3, 0.34, AppStatus.excluded),
        (1, 10, 0.0, AppStatus.suspicious),
        (1, 10, Fraction(1, 10), AppStatus.excluded),
    ],
)
def test_app_status(n_non_vendor, n_downloads, threshold, status):
    assert app_status(n_non_vendor, n_downloads, threshold) == status


def test_undefined_ratio():
    with pytest.raises(DataError):
        app_status(0, 0)
    with pytest.raises(DataError):
        app_suspicion_ratio([])
    assert app_suspicion_ratio([download(0), download(1, verified=False)]) == 0.5


def test_suspicious_app_labels_every_download():
    downloads = [download(0), download(1, verified=False), download(2, verified=False)]
    status, labels = label_app(downloads)
    assert status.status == AppStatus.suspicious
    assert (status.n_downloads, status.n_non_vendor) == (3, 2)
    assert [r.label for r in labels] == [Label.pos] * 3


def test_fold_excluded():
    downloads = [download(0), download(1, verified=False)]
    status, labels = label_app(downloads)
    assert status.status == AppStatus.excluded
    assert {r.label for r in labels} == {Label.excluded}

    status, labels = label_app(downloads, fold_excluded=True)
    assert status.status == AppStatus.excluded
    assert {r.label for r in labels} == {Label.neg}


def test_only_downloads_in_window():
    log = [
        download(0),
        download(1, kind=EventKind.update),
        download(2, app_id="app_1"),
        download(3, verified=False),
        download(4, verified=False, ts=10_000),
    ]
    assert [r.event_id for r in downloads_in_scope(log)] == [0, 2, 3, 4]
    assert [r.event_id for r in downloads_in_scope(log, window=(0, 180))] == [0, 2]
    assert [r.event_id for r in downloads_in_scope(log, exclude_event_ids={3})] == [0, 2, 4]

    labels = build_labels(log, window=(0, 200))
    assert labels.window == (0, 200)
    assert labels.excluded_event_ids == {0, 3}
    assert labels.negative_event_ids == {2}
    assert labels.label_of(1) is None
    assert labels.label_of(4) is None

    # the whole log without a window: 2 of 3 non-vendor makes app_0 suspicious
    labels = build_labels(log)
    assert labels.window == (0, 10_001)
    assert labels.positive_event_ids == {0, 3, 4}
    assert labels.app_status["app_0"].status == AppStatus.suspicious


def test_sample_days():
    day = 86400
    log = [download(i, ts=i * day + 5) for i in range(10)]
    days = sample_days(log, 4, seed=3)
    assert days == sample_days(log, 4, seed=3)
    assert len(set(days)) == 4
    assert days == sorted(days)
    assert set(days) <= set(range(10))
    with pytest.raises(ConfigError):
        sample_days(log, 11, seed=3)

    labels = build_labels(log, days=days)
    assert labels.negative_event_ids == set(days)


def test_class_balance():
    balance = class_balance(build_labels([download(0), download(1, app_id="app_1", verified=False)]))
    assert balance == (1, 1, 0.5)
    assert balance.defined

    balance = class_balance(build_labels([download(0)]))
    assert balance.ratio == 0.0

    empty = class_balance(LabelSet.from_records([]))
    assert empty.ratio is None
    assert not empty.defined


def naive_labels(log, threshold=0.5):
    downloads = defaultdict(list)
    for record in log:
        if record.kind == EventKind.download:
            downloads[record.app_id].append(record)
    labels = {}
    for records in downloads.values():
        share = sum(not r.vendor_verified for r in records) / len(records)
        label = "neg" if share == 0 else ("pos" if share > threshold else "excluded")
        labels.update({r.event_id: label for r in records})
    return labels


def test_matches_naive_recount(small_run):
    labels = build_labels(small_run.events)
    expected = naive_labels(small_run.events)
    assert {r.event_id: r.label.value for r in labels.records()} == expected
    assert labels.positive_event_ids.isdisjoint(labels.negative_event_ids)
    assert labels.positive_event_ids.isdisjoint(labels.excluded_event_ids)


@given(
    st.lists(
        st.tuples(st.sampled_from(["a", "b", "c", "d"]), st.booleans()),
        min_size=1,
        max_size=60,
    )
)
def test_labels_follow_app_counts(rows):
    log = [download(i, app_id=app, verified=verified) for i, (app, verified) in enumerate(rows)]
    labels = build_labels(log)
    assert {r.event_id: r.label.value for r in labels.records()} == naive_labels(log)
    for status in labels.app_status.values():
        assert status.n_downloads == sum(1 for app, _ in rows if app == status.app_id)
