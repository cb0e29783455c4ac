""" Core abstractions for fraudlab: stores, builders, validators and errors. """
from fraudlab.core.builder import Builder
from fraudlab.core.errors import (
    ConfigError,
    DataError,
    InputMissingError,
    LabError,
    ManifestMismatchError,
    ModelFormatError,
    ParseError,
    RecordValidationError,
    StoreError,
)
from fraudlab.core.store import Sort, Store
from fraudlab.core.validator import Validator

__all__ = [
    "Builder",
    "ConfigError",
    "DataError",
    "InputMissingError",
    "LabError",
    "ManifestMismatchError",
    "ModelFormatError",
    "ParseError",
    "RecordValidationError",
    "Sort",
    "Store",
    "StoreError",
    "Validator",
]
