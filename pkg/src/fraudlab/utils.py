"""
Utilities to help with fraudlab functions.
"""
import hashlib
import itertools
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, Union

import orjson

# import tqdm Jupyter widget if running inside Jupyter
from tqdm.auto import tqdm

JSON_OPTIONS = orjson.OPT_SORT_KEYS | orjson.OPT_INDENT_2 | orjson.OPT_SERIALIZE_NUMPY


def primed(iterable: Iterable) -> Iterable:
    """Preprimes an iterator so the first value is calculated immediately
    but not returned until the first iteration.
    """
    itr = iter(iterable)
    try:
        first = next(itr)
    except StopIteration:
        return itr
    return itertools.chain([first], itr)


class TqdmLoggingHandler(logging.Handler):
    """
    Helper to enable routing tqdm progress around logging.
    """

    def __init__(self, level=logging.NOTSET):
        """
        Initialize the Tqdm handler.
        """
        super().__init__(level)

    def emit(self, record):
        """
        Emit a record via Tqdm screen.
        """
        try:
            msg = self.format(record)
            tqdm.write(msg)
            self.flush()
        except (KeyboardInterrupt, SystemExit):
            raise
        except Exception:
            self.handleError(record)


class ReportingHandler(logging.Handler):
    """
    Helper to route reporting messages into a run manifest.

    Records carrying ``extra={"fraudlab": {...}}`` are appended to ``events``;
    warnings and errors from any logger are counted.
    """

    def __init__(self):
        """
        Initialize the Reporting Logger.
        """
        super().__init__(logging.NOTSET)
        self.events = []
        self.errors = 0
        self.warnings = []

    def emit(self, record):
        if "fraudlab" in record.__dict__:
            lab_record = dict(record.fraudlab)
            if lab_record.get("event") == "BUILD_ENDED":
                lab_record.update({"errors": self.errors, "warnings": len(self.warnings)})
            self.events.append(lab_record)
        if record.levelno >= logging.ERROR:
            self.errors += 1
        elif record.levelno >= logging.WARNING:
            self.warnings.append(record.getMessage())


def grouper(iterable: Iterable, n: int) -> Iterable:
    """
    Collect data into fixed-length chunks or blocks.
    >>> list(grouper('ABCDEFG', 3))
    [['A', 'B', 'C'], ['D', 'E', 'F'], ['G']].

    Updated from:
    https://stackoverflow.com/questions/31164731/python-chunking-csv-file-multiproccessing/31170795#31170795
    """
    iterable = iter(iterable)
    return iter(lambda: list(itertools.islice(iterable, n)), [])


def dumps_json(obj: Any) -> bytes:
    """
    Canonical JSON bytes: sorted keys, two-space indent, trailing newline.
    """
    return orjson.dumps(obj, option=JSON_OPTIONS) + b"\n"


def dump_json(obj: Any, path: Union[str, Path]):
    Path(path).write_bytes(dumps_json(obj))


def load_json(path: Union[str, Path]) -> Any:
    return orjson.loads(Path(path).read_bytes())


def sha256_hex(data: Union[bytes, Dict, list]) -> str:
    """
    Hex sha256 of raw bytes, or of the canonical JSON form of a dict/list.
    """
    if not isinstance(data, bytes):
        data = orjson.dumps(data, option=orjson.OPT_SORT_KEYS | orjson.OPT_SERIALIZE_NUMPY)
    return hashlib.sha256(data).hexdigest()
