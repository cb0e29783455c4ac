#!/usr/bin/env python
# coding utf-8

import logging
import time
from types import GeneratorType
from typing import Any, Dict, Iterable, Optional, Tuple

from tqdm.auto import tqdm

from fraudlab.core import Builder
from fraudlab.utils import grouper, primed


def prime_items(builder: Builder) -> Tuple[Iterable, Optional[int]]:
    """
    Start ``get_items`` and find how many items it will yield, if known.
    """
    cursor = builder.get_items()
    total = None
    if isinstance(cursor, GeneratorType):
        try:
            cursor = primed(cursor)
            total = builder.total
        except StopIteration:
            pass
    elif hasattr(cursor, "__len__"):
        total = len(cursor)  # type: ignore
    return cursor, total


def build_event(event: str, builder: Builder, **fields: Any) -> Dict:
    """The ``extra`` of a log record marking a stage boundary."""
    return {"fraudlab": {"event": event, "builder": builder.__class__.__name__, **fields}}


def serial(builder: Builder, no_bars=False) -> float:
    """
    Runs the builder in a single process.

    Returns:
        wall-clock seconds the build took
    """

    logger = logging.getLogger("SerialProcessor")
    started = time.perf_counter()

    builder.connect()
    cursor, total = prime_items(builder)

    logger.info(
        f"Starting serial processing: {builder.__class__.__name__}",
        extra=build_event("BUILD_STARTED", builder, total=total, **builder.store_names()),
    )
    for chunk in grouper(tqdm(cursor, total=total, disable=no_bars), builder.chunk_size):
        logger.info(f"Processing batch of {len(chunk)} items", extra=build_event("UPDATE", builder, items=len(chunk)))
        processed = [builder.process_item(item) for item in chunk]
        builder.update_targets([item for item in processed if item is not None])

    logger.info(f"Ended serial processing: {builder.__class__.__name__}", extra=build_event("BUILD_ENDED", builder))
    builder.finalize()
    return time.perf_counter() - started
