import asyncio
import pickle
import time
from concurrent.futures import ThreadPoolExecutor

import pytest

from fraudlab.cli.multiprocessing import AsyncUnorderedMap, BackPressure, Failure, grouper, multi, safe_dispatch
from fraudlab.core import Builder, DataError
from fraudlab.stores import MemoryStore


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


@pytest.mark.asyncio()
async def test_grouper():
    async def arange(count):
        for i in range(count):
            yield (i)

    async for group in grouper(arange(100), n=10):
        assert len(group) == 10

    async for group in grouper(arange(9), n=10):
        assert len(group) == 9


def wait_and_return(x):
    time.sleep(0.1)
    return x * x


def fail_on_one(x):
    if x == 1:
        raise DataError("one")
    return x


async def arange(n):
    for num in range(n):
        yield num


@pytest.mark.asyncio()
async def test_backpressure():
    iterable = range(10)
    backpressure = BackPressure(iterable, 2)

    # Put two items into the process queue
    await backpressure.__anext__()
    await backpressure.__anext__()

    # Ensure back_pressure enabled
    assert backpressure.back_pressure.locked()

    # Release back pressure
    releaser = backpressure.release(arange(10))
    await releaser.__anext__()
    assert not backpressure.back_pressure.locked()

    # Ensure can keep releasing backing pressure and won't error
    await releaser.__anext__()
    await releaser.__anext__()

    # Ensure stop iteration works
    with pytest.raises(StopAsyncIteration):  # noqa: PT012
        for _i in range(10):
            await releaser.__anext__()

    assert not backpressure.back_pressure.locked()


@pytest.mark.asyncio()
async def test_async_map():
    executor = ThreadPoolExecutor(1)
    amap = AsyncUnorderedMap(wait_and_return, arange(3), executor)
    true_values = {x * x for x in range(3)}

    finished_vals = set()
    async for finished_val in amap:
        finished_vals.add(finished_val)

    assert finished_vals == true_values


@pytest.mark.asyncio()
async def test_async_map_failure():
    executor = ThreadPoolExecutor(1)
    results = [item async for item in AsyncUnorderedMap(fail_on_one, arange(3), executor)]
    failures = [r for r in results if isinstance(r, Failure)]
    assert len(failures) == 1
    assert isinstance(failures[0].error, DataError)
    assert sorted(r for r in results if not isinstance(r, Failure)) == [0, 2]


def test_safe_dispatch():
    def bad_func(val):
        raise ValueError("AAAH")

    result = safe_dispatch((bad_func, ""))
    assert isinstance(result, Failure)
    assert str(result.error) == "AAAH"


def test_multi_matches_serial():
    builder = DummyBuilder(total=25)
    asyncio.run(multi(builder, num_processes=2, no_bars=True))
    assert builder.target.count() == 25
    assert [d["square"] for d in builder.target.query(sort={"k": 1})] == [i * i for i in range(25)]


def test_multi_failure():
    with pytest.raises(DataError, match="cannot square 7"):
        asyncio.run(multi(DummyBuilder(total=20, fail_on=7), num_processes=2, no_bars=True))


def test_error_pickles_across_processes():
    error = pickle.loads(pickle.dumps(DataError("bad")))
    assert isinstance(error, DataError)
    assert error.exit_code == 6
    assert str(error) == "bad"
