"""
Many-to-Many GroupBuilder.
"""
import traceback
from abc import ABCMeta, abstractmethod
from time import time
from typing import Any, Dict, Iterator, List, Optional

from fraudlab.core import Builder, Store


class GroupBuilder(Builder, metaclass=ABCMeta):
    """
    Group source docs and produce a list of target documents for each group.

    Groups are independent of each other, so the processed groups may reach
    update_targets in any order.
    """

    def __init__(
        self,
        source: Store,
        target: Store,
        grouping_keys: List[str],
        query: Optional[Dict] = None,
        **kwargs,
    ):
        """
        Args:
            source: source store
            target: target store
            grouping_keys: fields whose values define a group
            query: optional query to filter source store
        """
        self.source = source
        self.target = target
        self.grouping_keys = grouping_keys
        self.query = query
        self.kwargs = kwargs
        super().__init__(sources=[source], targets=[target], **kwargs)

    def get_groups(self) -> Iterator[List[Any]]:
        """
        Documents of the filtered source, one list per group in first-seen
        group order.
        """
        for _, docs in self.source.groupby(self.grouping_keys, criteria=self.query):
            yield docs

    def get_items(self) -> Iterator[List[Any]]:
        self.logger.info(f"Starting {self.__class__.__name__} Builder")
        groups = list(self.get_groups())
        self.total = len(groups)
        self.logger.info(f"Found {len(groups)} groups to process")
        yield from groups

    def process_item(self, item: List[Any]) -> List[Any]:  # type: ignore
        time_start = time()
        try:
            processed = self.unary_function(item)
        except Exception:
            self.logger.error(traceback.format_exc())
            raise
        self.logger.debug(f"Processed group of {len(item)} documents in {time() - time_start:.4f}s")
        return processed

    def update_targets(self, items: List[List[Any]]):
        """
        Generic update targets for Group Builder: flatten the per-group documents.
        """
        docs = [doc for group in items for doc in group]
        if len(docs) > 0:
            self.target.update(docs)

    @abstractmethod
    def unary_function(self, items: List[Any]) -> List[Any]:
        """
        Processing function for GroupBuilder.

        Arguments:
            items: list of documents with matching grouping keys

        Returns:
            list of target documents for the group
        """
