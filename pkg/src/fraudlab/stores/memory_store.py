"""
In-memory Store, the base for every file-backed store in fraudlab.
"""
from itertools import islice
from typing import Any, Dict, Iterator, List, Optional, Tuple, Union

from fraudlab.core import Sort, Store, StoreError
from fraudlab.core.store import doc_get, matches


class MemoryStore(Store):
    """
    An in-memory Store keyed by ``key``. Documents keep first-insertion
    order; updating an existing key replaces the document in place.
    """

    def __init__(self, collection_name: str = "memory_db", **kwargs):
        """
        Initializes the Memory Store.

        Args:
            collection_name: name for the collection in memory.
        """
        self.collection_name = collection_name
        self._docs: Optional[Dict[Any, Any]] = None
        self.kwargs = kwargs
        super().__init__(**kwargs)

    def connect(self, force_reset: bool = False):
        """
        Connect to the source data.
        """
        if self._docs is None or force_reset:
            self._docs = {}

    def close(self):
        """Close up all collections."""

    @property
    def name(self):
        """Name for the store."""
        return f"mem://{self.collection_name}"

    @property
    def _collection(self) -> Dict[Any, Any]:
        """Property referring to underlying document map."""
        if self._docs is None:
            raise StoreError("Must connect Store before accessing documents")
        return self._docs

    def _key_of(self, doc: Any, key: Union[List, str, None]) -> Any:
        key = key or self.key
        if isinstance(key, list):
            return tuple(doc_get(doc, k) for k in key)
        return doc_get(doc, key)

    def count(self, criteria: Optional[Dict] = None) -> int:
        if not criteria:
            return len(self._collection)
        return sum(1 for _ in self.query(criteria=criteria))

    def query(
        self,
        criteria: Optional[Dict] = None,
        sort: Optional[Dict[str, Union[Sort, int]]] = None,
        skip: int = 0,
        limit: int = 0,
    ) -> Iterator[Any]:
        docs = (d for d in self._collection.values() if matches(d, criteria))
        if sort:
            ordered = list(docs)
            for field, direction in reversed(list(sort.items())):
                direction = direction.value if isinstance(direction, Sort) else direction
                ordered.sort(key=lambda d: doc_get(d, field), reverse=direction == -1)
            docs = iter(ordered)
        stop = skip + limit if limit else None
        yield from islice(docs, skip, stop)

    def update(self, docs: Union[List[Any], Any], key: Union[List, str, None] = None):
        if not isinstance(docs, list):
            docs = [docs]
        for doc in docs:
            self._collection[self._key_of(doc, key)] = doc

    def groupby(
        self,
        keys: Union[List[str], str],
        criteria: Optional[Dict] = None,
    ) -> Iterator[Tuple[Dict, List[Any]]]:
        """
        Group documents by keys, in first-seen group order; documents inside a
        group keep store order.
        """
        keys = keys if isinstance(keys, list) else [keys]
        groups: Dict[Tuple, List[Any]] = {}
        for doc in self.query(criteria=criteria):
            groups.setdefault(tuple(doc_get(doc, k) for k in keys), []).append(doc)
        for values, docs in groups.items():
            yield dict(zip(keys, values)), docs

    def __hash__(self):
        return hash((self.name, self.key))

    def __eq__(self, other: object) -> bool:
        """
        Check equality for MemoryStore
        other: other MemoryStore to compare with.
        """
        if not isinstance(other, MemoryStore):
            return False

        fields = ["collection_name", "key"]
        return all(getattr(self, f) == getattr(other, f) for f in fields)
