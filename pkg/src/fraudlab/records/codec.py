"""
Fixed-column CSV codecs for the lab's record files.

Every codec reads and writes UTF-8 CSV with a fixed header and fixed column
order. Writing is byte-stable: ``write(parse(b)) == b`` for any file this
module wrote.
"""
import io
from abc import ABCMeta, abstractmethod
from pathlib import Path
from typing import Any, Dict, Generic, Iterable, List, Sequence, Tuple, TypeVar, Union

from pydantic import BaseModel, ValidationError

from fraudlab.core.errors import ParseError, RecordValidationError
from fraudlab.records.models import AppCatalogEntry, EventRecord, GroundTruthEntry

T = TypeVar("T", bound=BaseModel)

ByteSource = Union[bytes, str, Path, io.IOBase]


def decode_utf8(data: bytes) -> str:
    """
    Decode file bytes as UTF-8.

    Raises:
        ParseError: invalid UTF-8, with the line holding the first bad byte
    """
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as exc:
        line = data.count(b"\n", 0, exc.start) + 1
        raise ParseError(f"invalid UTF-8 byte 0x{data[exc.start]:02x}", line=line) from None


def read_text(stream: ByteSource) -> str:
    """
    Read a byte stream, a path or an already-decoded string into text.

    Raises:
        ParseError: the bytes are not valid UTF-8
    """
    if isinstance(stream, Path):
        return decode_utf8(stream.read_bytes())
    if isinstance(stream, bytes):
        return decode_utf8(stream)
    if isinstance(stream, str):
        return stream
    data = stream.read()
    return decode_utf8(data) if isinstance(data, bytes) else data


def _raise_from_validation(exc: ValidationError, line: int):
    error = exc.errors()[0]
    if error["type"] == "invariant_violation":
        raise RecordValidationError(error["ctx"]["invariant"], line=line) from None
    field = str(error["loc"][0]) if error["loc"] else None
    raise ParseError(error["msg"], line=line, field=field) from None


class RecordCodec(Generic[T], metaclass=ABCMeta):
    """
    Maps one record type to and from fixed-column CSV rows.
    """

    header: Tuple[str, ...] = ()
    key: str = ""
    model: type = BaseModel

    @abstractmethod
    def to_fields(self, record: T) -> Sequence[str]:
        """
        Format one record as its column strings.
        """

    @abstractmethod
    def from_fields(self, row: Dict[str, str]) -> Dict[str, Any]:
        """
        Convert raw column strings into model keyword arguments. Typed
        columns go through ``convert_field`` so a failure names its column.
        """

    def parse_row(self, fields: List[str], line: int) -> T:
        if len(fields) != len(self.header):
            raise ParseError(f"expected {len(self.header)} columns, found {len(fields)}", line=line)
        row = dict(zip(self.header, fields))
        try:
            kwargs = self.from_fields(row)
        except _FieldError as exc:
            raise ParseError(exc.message, line=line, field=exc.field) from None
        try:
            return self.model(**kwargs)
        except ValidationError as exc:
            _raise_from_validation(exc, line)
        raise AssertionError("unreachable")

    def check_unique(self, records: List[T], lines: List[int]):
        """
        Reject files where the key column repeats.
        """
        seen = set()
        for record, line in zip(records, lines):
            value = getattr(record, self.key)
            if value in seen:
                raise RecordValidationError(f"{self.key} unique (duplicate {value})", line=line, field=self.key)
            seen.add(value)

    def parse(self, stream: ByteSource) -> List[T]:
        """
        Parse a CSV byte stream into records, in file order.
        """
        text = read_text(stream)
        lines = text.split("\n")
        if lines and lines[-1] == "":
            lines.pop()
        if not lines:
            raise ParseError("missing header", line=1)
        header = tuple(lines[0].rstrip("\r").split(","))
        if header != self.header:
            raise ParseError(f"header must be {','.join(self.header)}", line=1)

        records = []
        line_numbers = []
        for offset, raw in enumerate(lines[1:], start=2):
            records.append(self.parse_row(raw.rstrip("\r").split(","), offset))
            line_numbers.append(offset)
        self.check_unique(records, line_numbers)
        return records

    def write(self, records: Iterable[T]) -> bytes:
        """
        Serialize records to CSV bytes, in the given order.
        """
        out = [",".join(self.header)]
        out.extend(",".join(self.to_fields(r)) for r in records)
        return ("\n".join(out) + "\n").encode("utf-8")


class _FieldError(ValueError):
    def __init__(self, field: str, message: str):
        self.field = field
        self.message = message
        super().__init__(message)


def convert_field(row: Dict[str, str], field: str, fn):
    try:
        return fn(row[field])
    except ValueError:
        raise _FieldError(field, f"cannot parse {row[field]!r}")


def parse_flag(text: str) -> bool:
    if text == "1":
        return True
    if text == "0":
        return False
    raise ValueError(text)


def parse_uint(text: str) -> int:
    # int() accepts "+1" and " 1"; file integers are plain digits
    if not text.isdigit():
        raise ValueError(text)
    return int(text)


def parse_rating(text: str) -> float:
    # at most one decimal place, the precision ratings are written with
    whole, _, decimals = text.partition(".")
    if not whole.isdigit() or len(decimals) > 1 or not (decimals == "" or decimals.isdigit()):
        raise ValueError(text)
    return float(text)


class EventCodec(RecordCodec[EventRecord]):
    header = ("event_id", "ts", "kind", "device_id", "vendor_verified", "app_id", "ip_hash", "source")
    key = "event_id"
    model = EventRecord

    def to_fields(self, record: EventRecord) -> Sequence[str]:
        return (
            str(record.event_id),
            str(record.ts),
            record.kind.value,
            record.device_id,
            "1" if record.vendor_verified else "0",
            record.app_id,
            record.ip_hash,
            record.source.value,
        )

    def from_fields(self, row: Dict[str, str]) -> Dict[str, Any]:
        return {
            "event_id": convert_field(row, "event_id", parse_uint),
            "ts": convert_field(row, "ts", int),
            "kind": row["kind"],
            "device_id": row["device_id"],
            "vendor_verified": convert_field(row, "vendor_verified", parse_flag),
            "app_id": row["app_id"],
            "ip_hash": row["ip_hash"],
            "source": row["source"],
        }


class CatalogCodec(RecordCodec[AppCatalogEntry]):
    header = ("app_id", "category", "rating", "release_ts")
    key = "app_id"
    model = AppCatalogEntry

    def to_fields(self, record: AppCatalogEntry) -> Sequence[str]:
        return (record.app_id, record.category.value, f"{record.rating:.1f}", str(record.release_ts))

    def from_fields(self, row: Dict[str, str]) -> Dict[str, Any]:
        return {
            "app_id": row["app_id"],
            "category": row["category"],
            "rating": convert_field(row, "rating", parse_rating),
            "release_ts": convert_field(row, "release_ts", int),
        }


class GroundTruthCodec(RecordCodec[GroundTruthEntry]):
    header = ("event_id", "fraud_type")
    key = "event_id"
    model = GroundTruthEntry

    def to_fields(self, record: GroundTruthEntry) -> Sequence[str]:
        return (str(record.event_id), str(int(record.fraud_type)))

    def from_fields(self, row: Dict[str, str]) -> Dict[str, Any]:
        return {
            "event_id": convert_field(row, "event_id", parse_uint),
            "fraud_type": convert_field(row, "fraud_type", parse_uint),
        }


EVENT_CODEC = EventCodec()
CATALOG_CODEC = CatalogCodec()
GROUND_TRUTH_CODEC = GroundTruthCodec()


def parse_log(stream: ByteSource) -> List[EventRecord]:
    """
    Parse an event-log CSV into records, in file order, validating every
    record invariant and event_id uniqueness.

    Raises:
        ParseError: malformed row, with line number and field.
        RecordValidationError: invariant violation, naming the invariant.
    """
    return EVENT_CODEC.parse(stream)


def write_log(records: Iterable[EventRecord]) -> bytes:
    """
    Serialize an event log; ``parse_log(write_log(r)) == r``.
    """
    return EVENT_CODEC.write(records)


def parse_catalog(stream: ByteSource) -> Dict[str, AppCatalogEntry]:
    """
    Parse a catalog CSV into a mapping app_id -> entry, preserving file order.
    """
    return {entry.app_id: entry for entry in CATALOG_CODEC.parse(stream)}


def write_catalog(catalog: Union[Dict[str, AppCatalogEntry], Iterable[AppCatalogEntry]]) -> bytes:
    """
    Serialize a catalog; ratings are written with exactly one decimal place.
    """
    entries = catalog.values() if isinstance(catalog, dict) else catalog
    return CATALOG_CODEC.write(entries)


def parse_ground_truth(stream: ByteSource) -> List[GroundTruthEntry]:
    return GROUND_TRUTH_CODEC.parse(stream)


def write_ground_truth(entries: Iterable[GroundTruthEntry]) -> bytes:
    return GROUND_TRUTH_CODEC.write(entries)
