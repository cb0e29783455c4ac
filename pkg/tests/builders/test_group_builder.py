"""
Tests for group builder
"""
from typing import Dict, List

import pytest

from fraudlab.builders import GroupBuilder
from fraudlab.stores import MemoryStore


@pytest.fixture()
def docs():
    return [{"k": i, "a": i % 3, "b": i * i} for i in range(20)]


@pytest.fixture()
def source(docs):
    store = MemoryStore("source", key="k")
    store.connect()
    store.update(docs)
    return store


@pytest.fixture()
def target():
    store = MemoryStore("target", key="a")
    store.connect()
    return store


class DummyGrouper(GroupBuilder):
    def unary_function(self, items: List[Dict]) -> List[Dict]:
        return [{"a": items[0]["a"], "ks": [d["k"] for d in items], "b": sum(d["b"] for d in items)}]


def test_grouping(source, target, docs):
    builder = DummyGrouper(source, target, grouping_keys=["a"])

    to_process = list(builder.get_items())
    assert builder.total == 3
    assert [[d["k"] for d in group][:2] for group in to_process] == [[0, 3], [1, 4], [2, 5]]

    processed = [builder.process_item(d) for d in to_process]
    builder.update_targets(processed)

    assert target.count() == 3
    assert target.query_one({"a": 0})["ks"] == list(range(0, 20, 3))
    assert sum(d["b"] for d in target.query()) == sum(d["b"] for d in docs)


def test_query(source, target):
    builder = DummyGrouper(source, target, grouping_keys=["a"], query={"k": {"$lt": 5}})
    builder.run()
    assert [d["ks"] for d in target.query()] == [[0, 3], [1, 4], [2]]


def test_failure_is_raised(source, target):
    class Broken(GroupBuilder):
        def unary_function(self, items):
            raise ValueError("boom")

    builder = Broken(source, target, grouping_keys=["a"])
    with pytest.raises(ValueError, match="boom"):
        builder.process_item(next(iter(builder.get_items())))


def test_serialization(source, target):
    builder = DummyGrouper(source, target, grouping_keys=["a"], chunk_size=5)
    d = builder.as_dict()
    assert d["grouping_keys"] == ["a"]
    assert d["chunk_size"] == 5
    assert d["source"]["collection_name"] == "source"
