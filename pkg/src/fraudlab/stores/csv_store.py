"""
Stores backed by the lab's fixed-column CSV record files.
"""
from importlib import import_module
from pathlib import Path
from typing import Dict, List, Union

from fraudlab.core import InputMissingError, StoreError
from fraudlab.records.codec import RecordCodec
from fraudlab.stores.memory_store import MemoryStore

# name -> "module:attribute" of the codec instance, resolved lazily so that
# stage packages can register their own record files without import cycles
CODECS: Dict[str, str] = {
    "events": "fraudlab.records.codec:EVENT_CODEC",
    "catalog": "fraudlab.records.codec:CATALOG_CODEC",
    "ground_truth": "fraudlab.records.codec:GROUND_TRUTH_CODEC",
    "labels": "fraudlab.labeling.models:LABEL_CODEC",
    "app_status": "fraudlab.labeling.models:APP_STATUS_CODEC",
    "type1_flags": "fraudlab.evaluation.rule_filter:FLAG_CODEC",
}


def get_codec(name: str) -> RecordCodec:
    """
    Look up a registered record codec by name.
    """
    try:
        module_name, attribute = CODECS[name].split(":")
    except KeyError:
        raise StoreError(f"Unknown record codec {name!r}; known: {', '.join(sorted(CODECS))}") from None
    return getattr(import_module(module_name), attribute)


class CSVStore(MemoryStore):
    """
    A Store for one CSV record file. ``connect`` parses the whole file,
    ``close`` rewrites it when the store is writable.

    Written files are sorted by the store key, so the bytes on disk never
    depend on the order documents were updated in.
    """

    def __init__(
        self,
        path: Union[str, Path],
        codec: str = "events",
        read_only: bool = True,
        sort_on_write: bool = True,
        **kwargs,
    ):
        """
        Args:
            path: location of the CSV file
            codec: name of the record codec, one of ``CODECS``
            read_only: if False the file is (re)written on close
            sort_on_write: sort documents by key when writing; file order
                is kept otherwise
        """
        self.path = Path(path)
        self.codec = codec
        self.read_only = read_only
        self.sort_on_write = sort_on_write
        self._codec = get_codec(codec)
        kwargs.setdefault("key", self._codec.key)
        super().__init__(collection_name=self.path.name, **kwargs)

    @property
    def name(self) -> str:
        return f"csv://{self.path}"

    def connect(self, force_reset: bool = False):
        """
        Load the file. A writable store is an output and starts empty; its
        file is replaced on close. A read-only store requires the file.
        """
        if self._docs is not None and not force_reset:
            return
        if not self.read_only:
            self._docs = {}
            return
        if not self.path.exists():
            raise InputMissingError(f"Missing input file {self.path}")
        self.logger.debug(f"Reading {self.path}")
        records = self._codec.parse(self.path)
        self._docs = {self._key_of(r, None): r for r in records}

    def update(self, docs: Union[List, object], key: Union[List, str, None] = None):
        if self.read_only:
            raise StoreError(f"Cannot update read-only store {self.name}")
        super().update(docs, key=key)

    def write(self) -> bytes:
        """
        Serialize the current documents in file form.
        """
        docs = list(self._collection.values())
        if self.sort_on_write:
            docs.sort(key=lambda d: self._key_of(d, None))
        return self._codec.write(docs)

    def close(self):
        if self.read_only or self._docs is None:
            return
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self.path.write_bytes(self.write())
        self.logger.debug(f"Wrote {len(self._docs)} records to {self.path}")

    def __hash__(self):
        return hash((self.name, self.codec))

    def __eq__(self, other: object) -> bool:
        """
        Check equality for CSVStore.

        Args:
            other: other CSVStore to compare with
        """
        if not isinstance(other, CSVStore):
            return False

        fields = ["path", "codec", "key", "read_only"]
        return all(getattr(self, f) == getattr(other, f) for f in fields)
