"""
One-to-One Map Builder.
"""
import traceback
from abc import ABCMeta, abstractmethod
from time import time
from typing import Any, Dict, Iterator, List, Optional

from fraudlab.core import Builder, Store


class MapBuilder(Builder, metaclass=ABCMeta):
    """
    Apply a unary function to yield a target document for each source document.

    Unlike an incremental build, every run processes the whole (filtered)
    source: lab stages are pure functions of their inputs.
    """

    def __init__(
        self,
        source: Store,
        target: Store,
        query: Optional[Dict] = None,
        **kwargs,
    ):
        """
        Apply a unary function to each source document.

        Args:
            source: source store
            target: target store
            query: optional query to filter source store
        """
        self.source = source
        self.target = target
        self.query = query
        self.kwargs = kwargs
        super().__init__(sources=[source], targets=[target], **kwargs)

    def get_items(self) -> Iterator[Any]:
        """
        Generic get items for Map Builder: every source document matching the query.
        """
        self.logger.info(f"Starting {self.__class__.__name__} Builder")
        self.total = self.source.count(criteria=self.query)
        self.logger.info(f"Processing {self.total} items")
        yield from self.source.query(criteria=self.query)

    def process_item(self, item: Any) -> Any:
        """
        Generic process items to process a document using the map function.
        Failures are logged with their traceback and re-raised: a lab stage
        never writes partial output.
        """
        time_start = time()
        try:
            processed = self.unary_function(item)
        except Exception:
            self.logger.error(traceback.format_exc())
            raise
        self.logger.debug(f"Processed {item!r:.80} in {time() - time_start:.4f}s")
        return processed

    def update_targets(self, items: List[Any]):
        """
        Generic update targets for Map Builder.
        """
        if len(items) > 0:
            self.target.update(items)

    @abstractmethod
    def unary_function(self, item: Any) -> Any:
        """
        ufn: Unary function to process item.
        Any uncaught exception fails the build.
        """
