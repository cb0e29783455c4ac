""" Root store module with easy imports for implemented Stores """
from fraudlab.stores.csv_store import CODECS, CSVStore, get_codec
from fraudlab.stores.memory_store import MemoryStore

__all__ = ["CODECS", "CSVStore", "MemoryStore", "get_codec"]
