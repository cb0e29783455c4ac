import logging

import pytest

from fraudlab.cli.serial import build_event, prime_items, serial
from fraudlab.core import Builder, DataError
from fraudlab.stores import MemoryStore
from fraudlab.utils import ReportingHandler


class DummyBuilder(Builder):
    """Squares 0..total-1 into a MemoryStore keyed by ``k``."""

    def __init__(self, total=10, fail_on=None, chunk_size=4):
        self.total_items = total
        self.fail_on = fail_on
        self.get_called = 0
        self.update_called = 0
        self.target = MemoryStore("squares", key="k")
        super().__init__(sources=[], targets=[self.target], chunk_size=chunk_size)
        self.total = total

    def get_items(self):
        for i in range(self.total_items):
            self.get_called += 1
            yield i

    def process_item(self, item):
        if item == self.fail_on:
            raise DataError(f"cannot square {item}")
        return {"k": item, "square": item * item}

    def update_targets(self, items):
        self.update_called += 1
        self.target.update(items)

    def as_dict(self):
        return {"total": self.total_items, "fail_on": self.fail_on, "chunk_size": self.chunk_size}


def test_serial():
    builder = DummyBuilder(total=10)

    elapsed = serial(builder, no_bars=True)
    assert elapsed >= 0
    assert builder.get_called == 10
    assert builder.update_called == 3
    assert [d["square"] for d in builder.target.query(sort={"k": 1})] == [i * i for i in range(10)]


def test_serial_events():
    handler = ReportingHandler()
    root = logging.getLogger()
    level = root.level
    root.setLevel(logging.INFO)
    root.addHandler(handler)
    try:
        serial(DummyBuilder(total=5), no_bars=True)
    finally:
        root.removeHandler(handler)
        root.setLevel(level)

    events = [e["event"] for e in handler.events]
    assert events == ["BUILD_STARTED", "UPDATE", "UPDATE", "BUILD_ENDED"]
    assert handler.events[0]["total"] == 5
    assert handler.events[0]["targets"] == ["mem://squares"]


def test_serial_failure():
    with pytest.raises(DataError, match="cannot square 3"):
        serial(DummyBuilder(total=10, fail_on=3), no_bars=True)


def test_prime_items():
    builder = DummyBuilder(total=3)
    cursor, total = prime_items(builder)
    # priming runs get_items up to its first item
    assert builder.get_called == 1
    assert total == 3
    assert list(cursor) == [0, 1, 2]


def test_build_event():
    assert build_event("UPDATE", DummyBuilder(), items=2) == {
        "fraudlab": {"event": "UPDATE", "builder": "DummyBuilder", "items": 2}
    }
