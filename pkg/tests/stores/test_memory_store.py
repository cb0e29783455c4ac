import pickle

import pytest

from fraudlab.core import Sort, StoreError
from fraudlab.stores import MemoryStore


@pytest.fixture()
def memorystore():
    store = MemoryStore("profiles", key="entity_id")
    store.connect()
    return store


def test_memory_store_connect():
    store = MemoryStore("profiles", key="entity_id")
    with pytest.raises(StoreError, match="Must connect"):
        store.count()
    with store:
        assert store.count() == 0


def test_memory_store_update_and_query(memorystore):
    memorystore.update([{"entity_id": "b", "n": 2}, {"entity_id": "a", "n": 1}])
    memorystore.update({"entity_id": "b", "n": 3})

    assert memorystore.count() == 2
    # replacing a key keeps its first-insertion slot
    assert [d["entity_id"] for d in memorystore.query()] == ["b", "a"]
    assert memorystore.query_one({"entity_id": "b"})["n"] == 3
    assert [d["n"] for d in memorystore.query(sort={"n": Sort.Ascending})] == [1, 3]
    assert [d["n"] for d in memorystore.query(sort={"n": -1}, limit=1)] == [3]
    assert [d["n"] for d in memorystore.query(skip=1)] == [1]
    assert memorystore.count({"n": {"$gte": 2}}) == 1
    assert memorystore.count({"entity_id": {"$in": ["a", "z"]}}) == 1
    assert memorystore.count({"entity_id": {"$nin": ["a"]}}) == 1
    assert memorystore.distinct("n") == [3, 1]


def test_memory_store_groupby(memorystore):
    memorystore.update([{"entity_id": i, "kind": "app" if i % 3 else "device"} for i in range(7)])
    groups = list(memorystore.groupby("kind"))
    assert [g for g, _ in groups] == [{"kind": "device"}, {"kind": "app"}]
    assert [d["entity_id"] for d in groups[0][1]] == [0, 3, 6]
    assert len(groups[1][1]) == 4


def test_memory_store_keeps_documents_as_given():
    doc = {"event_id": 0, "device_id": "", "vendor_verified": True}
    store = MemoryStore("events")
    store.connect()
    store.update(doc)
    assert store.query_one() == doc
    # records are checked where they are parsed, not by the store
    with pytest.raises(TypeError):
        MemoryStore("events", validator=None)


def test_memory_store_equality_and_pickle():
    store = MemoryStore("profiles", key="entity_id")
    assert store == MemoryStore("profiles", key="entity_id")
    assert store != MemoryStore("other", key="entity_id")

    restored = pickle.loads(pickle.dumps(store))
    assert restored == store
    assert restored.key == "entity_id"
