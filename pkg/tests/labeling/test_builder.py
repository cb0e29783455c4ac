import asyncio

import pytest

from fraudlab.cli.multiprocessing import multi
from fraudlab.cli.serial import serial
from fraudlab.labeling import APP_STATUS_CODEC, LABEL_CODEC, LabelBuilder, LabelSet, build_labels
from fraudlab.records import write_log
from fraudlab.stores import CSVStore, MemoryStore


@pytest.fixture()
def log_file(small_run, tmp_path):
    path = tmp_path / "events.csv"
    path.write_bytes(write_log(small_run.events))
    return path


def label_builder(log_file, out_dir, **kwargs):
    return LabelBuilder(
        CSVStore(log_file),
        CSVStore(out_dir / "labels.csv", codec="labels", read_only=False),
        CSVStore(out_dir / "app_status.csv", codec="app_status", read_only=False),
        **kwargs,
    )


def test_builder_matches_build_labels(small_run, log_file, tmp_path):
    serial(label_builder(log_file, tmp_path), no_bars=True)

    expected = build_labels(small_run.events)
    assert LABEL_CODEC.parse(tmp_path / "labels.csv") == expected.records()
    statuses = APP_STATUS_CODEC.parse(tmp_path / "app_status.csv")
    assert [s.app_id for s in statuses] == sorted(expected.app_status)
    assert {s.app_id: s for s in statuses} == dict(expected.app_status)


def test_builder_output_is_independent_of_workers(log_file, tmp_path):
    serial(label_builder(log_file, tmp_path / "serial"), no_bars=True)
    asyncio.run(multi(label_builder(log_file, tmp_path / "multi"), num_processes=2, no_bars=True))
    for name in ("labels.csv", "app_status.csv"):
        assert (tmp_path / "serial" / name).read_bytes() == (tmp_path / "multi" / name).read_bytes()


def test_builder_window_and_flags(small_run, log_file, tmp_path):
    events = small_run.events
    window = (events[0].ts, events[len(events) // 2].ts)
    flagged = [e.event_id for e in events if e.kind.value == "download"][:10]
    flags = MemoryStore("flags", key="event_id")
    flags.connect()
    flags.update([{"event_id": e, "reason": "portal_source"} for e in flagged])

    serial(label_builder(log_file, tmp_path, window=window, flags=flags), no_bars=True)

    expected = build_labels(events, window=window, exclude_event_ids=flagged)
    labels = LabelSet.from_records(LABEL_CODEC.parse(tmp_path / "labels.csv"))
    assert labels.positive_event_ids == expected.positive_event_ids
    assert labels.negative_event_ids == expected.negative_event_ids
    assert labels.excluded_event_ids == expected.excluded_event_ids
    assert labels.label_of(flagged[0]) is None


def test_builder_serialization(log_file, tmp_path):
    builder = label_builder(log_file, tmp_path, threshold=0.4, window=[0, 10], days=[3, 1])
    d = builder.as_dict()
    assert d["threshold"] == 0.4
    assert list(d["window"]) == [0, 10]
    assert d["days"] == [1, 3]
