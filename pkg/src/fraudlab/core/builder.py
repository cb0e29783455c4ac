"""
The stage base class: every per-group or per-record pipeline stage is a Builder.
"""

import logging
from abc import ABCMeta, abstractmethod
from typing import Any, Dict, Iterable, List, Optional, Union

from monty.json import MontyDecoder, MSONable

from fraudlab.core.store import Store


class Builder(MSONable, metaclass=ABCMeta):
    """
    A pipeline stage that reads source stores and writes target stores in
    four phases:

    - ``get_items``: read what to process from the sources
    - ``process_item``: turn one item into output; no store access, so it
      can run in a worker process
    - ``update_targets``: hand processed items to the targets
    - ``finalize``: close the stores, which flushes writable files

    The multiprocessing runner delivers processed items in completion order,
    so a stage's output may depend on the set of processed items but never
    on their order. Writable CSV stores sort on flush for that reason.

    Builders travel to worker processes through ``as_dict``: every
    constructor argument must be stored as an attribute of the same name.
    """

    def __init__(
        self,
        sources: Union[List[Store], Store],
        targets: Union[List[Store], Store],
        chunk_size: int = 1000,
    ):
        """
        Arguments:
            sources: source Store(s)
            targets: target Store(s)
            chunk_size: number of items handed to update_targets at once
        """
        self.sources = sources if isinstance(sources, list) else [sources]
        self.targets = targets if isinstance(targets, list) else [targets]
        self.chunk_size = chunk_size
        # set by get_items when the number of items is known up front
        self.total: Optional[int] = None
        self.logger = logging.getLogger(type(self).__name__)
        self.logger.addHandler(logging.NullHandler())

    def connect(self):
        """
        Load the sources and prepare the targets.
        """
        for store in self.sources + self.targets:
            store.connect()

    def store_names(self) -> Dict[str, List[str]]:
        """
        Names of the source and target stores, for build events.
        """
        return {
            "sources": [source.name for source in self.sources],
            "targets": [target.name for target in self.targets],
        }

    @abstractmethod
    def get_items(self) -> Iterable:
        """
        Items to process, e.g. the download records of one app or a chunk of
        labeled downloads. A generator should set ``self.total`` before its
        first yield so runners can size progress bars.
        """

    def process_item(self, item: Any) -> Any:
        """
        Process one item and return picklable output, or None to skip it.
        Must not touch any store. Returns the item unchanged by default.
        """
        return item

    @abstractmethod
    def update_targets(self, items: List):
        """
        Add a chunk of processed items to the target stores.
        """

    def finalize(self):
        """
        Close all stores; writable stores write their files here.
        """
        for store in self.sources + self.targets:
            store.close()

    def run(self, no_bars: bool = True) -> float:
        """
        Run the stage in this process.

        Returns:
            wall-clock seconds the build took
        """
        from fraudlab.cli.serial import serial

        return serial(self, no_bars=no_bars)

    def __getstate__(self):
        return self.as_dict()

    def __setstate__(self, d):
        d = {k: v for k, v in d.items() if not k.startswith("@")}
        d = MontyDecoder().process_decoded(d)
        self.__init__(**d)
