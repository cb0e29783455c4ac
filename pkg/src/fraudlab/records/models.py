"""
Canonical event-log, catalog and ground-truth record types.

All types are frozen pydantic models, so they are safe to share across
readers once constructed. Cross-field invariants are enforced at
construction and reported by name.
"""
from enum import Enum, IntEnum
from typing import List

from pydantic import BaseModel, ConfigDict, Field
from pydantic import model_validator
from pydantic_core import PydanticCustomError

HEX16 = r"^[0-9a-f]{16}$"
TOKEN = r"^[^,\s]+$"

# 7 days; the horizon that makes a device or an app "new"
NEW_HORIZON_SECONDS = 168 * 3600


class EventKind(str, Enum):
    """Kind of market event."""

    download = "download"
    search = "search"
    view = "view"
    install = "install"
    update = "update"


class Source(str, Enum):
    """Where a download or update came from. ``null`` means no source recorded."""

    client = "client"
    portal = "portal"
    update = "update"
    null = "null"


class Category(str, Enum):
    """App categories. The declaration order is the integer code used in feature vectors."""

    Finance = "Finance"
    Game = "Game"
    Tools = "Tools"
    Social = "Social"
    Shopping = "Shopping"
    Education = "Education"
    Life = "Life"
    Other = "Other"

    @property
    def code(self) -> int:
        return list(Category).index(self)


class FraudType(IntEnum):
    """Simulator-side ground truth for one record."""

    legit = 0
    type1 = 1
    type2 = 2
    type3 = 3


def _invariant(name: str) -> PydanticCustomError:
    return PydanticCustomError("invariant_violation", "{invariant}", {"invariant": name})


class EventRecord(BaseModel):
    """
    One timestamped market event.

    An empty ``device_id`` means the event carries no device ID.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    event_id: int = Field(..., ge=0, lt=2**64, description="Sequence number, unique within a log file")
    ts: int = Field(..., description="Epoch seconds, UTC")
    kind: EventKind
    device_id: str = Field("", pattern=r"^([0-9a-f]{16})?$")
    vendor_verified: bool
    app_id: str = Field(..., pattern=TOKEN)
    ip_hash: str = Field(..., pattern=HEX16)
    source: Source

    @model_validator(mode="after")
    def check_invariants(self) -> "EventRecord":
        violations = event_invariant_violations(self)
        if violations:
            raise _invariant(violations[0])
        return self

    @property
    def has_device(self) -> bool:
        return self.device_id != ""


class AppCatalogEntry(BaseModel):
    """Static app metadata."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    app_id: str = Field(..., pattern=TOKEN)
    category: Category
    rating: float
    release_ts: int = Field(..., ge=0, description="Epoch seconds, UTC")

    @model_validator(mode="after")
    def check_invariants(self) -> "AppCatalogEntry":
        violations = catalog_invariant_violations(self)
        if violations:
            raise _invariant(violations[0])
        return self


class GroundTruthEntry(BaseModel):
    """Fraud type of one simulated record."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    event_id: int = Field(..., ge=0, lt=2**64)
    fraud_type: FraudType


def event_invariant_violations(record: EventRecord) -> List[str]:
    """
    Names of the EventRecord invariants the record violates, in check order.
    """
    violations = []
    if record.ts < 0:
        violations.append("ts >= 0")
    update_kind = record.kind == EventKind.update
    update_source = record.source == Source.update
    if update_kind != update_source:
        violations.append("kind/source mismatch")
    elif record.source == Source.portal and record.kind != EventKind.download:
        violations.append("kind/source mismatch")
    if record.vendor_verified and not record.device_id:
        violations.append("vendor_verified requires device_id")
    return violations


def catalog_invariant_violations(entry: AppCatalogEntry) -> List[str]:
    """
    Names of the AppCatalogEntry invariants the entry violates.
    """
    if not 1.0 <= entry.rating <= 5.0:
        return ["rating in [1, 5]"]
    return []
