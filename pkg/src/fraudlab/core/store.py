"""
Module containing the core Store definition.
"""

import logging
from abc import ABCMeta, abstractmethod
from enum import Enum
from typing import Any, Dict, Iterator, List, Optional, Tuple, Union

from monty.json import MontyDecoder, MSONable
from pydash import get


class Sort(Enum):
    """Enumeration for sorting order."""

    Ascending = 1
    Descending = -1


def doc_get(doc: Any, field: str) -> Any:
    """
    Read a field from a dict document or an attribute from a record model.
    """
    if isinstance(doc, dict):
        return get(doc, field)
    return getattr(doc, field)


def matches(doc: Any, criteria: Optional[Dict]) -> bool:
    """
    Simple criteria matching: ``{field: value}`` for equality and
    ``{field: {op: operand}}`` with op one of ``$in``, ``$nin``, ``$gte``, ``$lt``.
    """
    if not criteria:
        return True
    for field, expected in criteria.items():
        value = doc_get(doc, field)
        if isinstance(expected, dict):
            if not all(_OPERATORS[op](value, operand) for op, operand in expected.items()):
                return False
        elif value != expected:
            return False
    return True


_OPERATORS = {
    "$in": lambda value, operand: value in operand,
    "$nin": lambda value, operand: value not in operand,
    "$gte": lambda value, operand: value >= operand,
    "$lt": lambda value, operand: value < operand,
}


class Store(MSONable, metaclass=ABCMeta):
    """
    Abstract class for a data Store.
    Defines the interface for all data going in and out of a Builder.

    Documents are either plain dicts or frozen record models; ``key`` names
    the field that identifies a document.
    """

    def __init__(
        self,
        key: str = "event_id",
    ):
        """
        Args:
            key: main key to index on
        """
        self.key = key
        self.logger = logging.getLogger(type(self).__name__)
        self.logger.addHandler(logging.NullHandler())

    @property
    @abstractmethod
    def name(self) -> str:
        """
        Return a string representing this data source.
        """

    @abstractmethod
    def connect(self, force_reset: bool = False):
        """
        Connect to the source data.

        Args:
            force_reset: whether to reset the connection or not
        """

    @abstractmethod
    def close(self):
        """
        Closes any connections, flushing buffered writes.
        """

    @abstractmethod
    def count(self, criteria: Optional[Dict] = None) -> int:
        """
        Counts the number of documents matching the query criteria.

        Args:
            criteria: filter for documents to count
        """

    @abstractmethod
    def query(
        self,
        criteria: Optional[Dict] = None,
        sort: Optional[Dict[str, Union[Sort, int]]] = None,
        skip: int = 0,
        limit: int = 0,
    ) -> Iterator[Any]:
        """
        Queries the Store for a set of documents.

        Args:
            criteria: filter for documents to search in
            sort: Dictionary of sort order for fields. Keys are field names and
                values are 1 for ascending or -1 for descending.
            skip: number documents to skip
            limit: limit on total number of documents returned
        """

    @abstractmethod
    def update(self, docs: Union[List[Any], Any], key: Union[List, str, None] = None):
        """
        Update documents into the Store.

        Args:
            docs: the document or list of documents to update
            key: field name(s) to determine uniqueness for a
                 document, can be a list of multiple fields,
                 a single field, or None if the Store's key
                 field is to be used
        """

    @abstractmethod
    def groupby(
        self,
        keys: Union[List[str], str],
        criteria: Optional[Dict] = None,
    ) -> Iterator[Tuple[Dict, List[Any]]]:
        """
        Simple grouping function that will group documents
        by keys.

        Args:
            keys: fields to group documents
            criteria: filter for documents to search in

        Returns:
            generator returning tuples of (dict, list of docs)
        """

    def query_one(self, criteria: Optional[Dict] = None, sort: Optional[Dict[str, Union[Sort, int]]] = None):
        """
        Queries the Store for a single document.

        Args:
            criteria: filter for documents to search
            sort: Dictionary of sort order for fields. Keys are field names and
                values are 1 for ascending or -1 for descending.
        """
        return next(self.query(criteria=criteria, sort=sort, limit=1), None)

    def distinct(self, field: str, criteria: Optional[Dict] = None) -> List:
        """
        Get all distinct values for a field, in first-seen order.

        Args:
            field: the field to get distinct values for
            criteria: filter for documents to search in
        """
        seen: Dict[Any, None] = {}
        for doc in self.query(criteria=criteria):
            seen.setdefault(doc_get(doc, field), None)
        return list(seen)

    def __ne__(self, other):
        return not self == other

    def __getstate__(self):
        return self.as_dict()

    def __setstate__(self, d):
        d = {k: v for k, v in d.items() if not k.startswith("@")}
        d = MontyDecoder().process_decoded(d)
        self.__init__(**d)

    def __enter__(self):
        self.connect()
        return self

    def __exit__(self, exception_type, exception_value, traceback):
        self.close()
