"""
Feature matrices: the labeled rows handed to the classifier, their CSV file
and the feature manifest that fixes column order and tags.
"""
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from fraudlab.core import DataError, InputMissingError, ParseError
from fraudlab.features.featurize import featurize
from fraudlab.features.profiles import EntityProfiles, build_profiles
from fraudlab.features.registry import (
    CATEGORY_CODES,
    FEATURE_REGISTRY_VERSION,
    FEATURES,
    FeatureSpec,
    feature_set_columns,
)
from fraudlab.labeling.models import Label, LabelSet
from fraudlab.records.codec import read_text
from fraudlab.records.models import AppCatalogEntry, EventKind, EventRecord
from fraudlab.utils import dumps_json, load_json, sha256_hex

logger = logging.getLogger(__name__)

MATRIX_FORMAT_VERSION = 1
MATRIX_FILE = "matrix.csv"
MANIFEST_FILE = "feature_manifest.json"
LABEL_CODES = {Label.pos: 1, Label.neg: 0}

_REGISTRY = {f.name: f for f in FEATURES}


def format_value(value: Any, dtype: str) -> str:
    if dtype in ("bool", "int"):
        return str(int(value))
    return repr(float(value))


@dataclass
class FeatureMatrix:
    """
    Labeled feature rows sorted by event_id. ``X`` holds the feature columns
    in ``features`` order, ``y`` is 1 for positive and 0 for negative rows.
    """

    event_ids: List[int]
    app_ids: List[str]
    X: np.ndarray
    y: np.ndarray
    features: Tuple[FeatureSpec, ...] = FEATURES
    feature_set: str = "all"

    def __post_init__(self):
        n = len(self.event_ids)
        if self.X.shape != (n, len(self.features)) or len(self.y) != n or len(self.app_ids) != n:
            raise AssertionError(
                f"matrix dimensions disagree: X {self.X.shape}, {len(self.y)} labels, "
                f"{len(self.app_ids)} app ids, {n} rows, {len(self.features)} features"
            )

    def __len__(self) -> int:
        return len(self.event_ids)

    @property
    def feature_names(self) -> Tuple[str, ...]:
        return tuple(f.name for f in self.features)

    @property
    def columns(self) -> List[str]:
        return ["event_id", "app_id", *self.feature_names, "label"]

    @property
    def manifest(self) -> Dict:
        return {
            "format_version": MATRIX_FORMAT_VERSION,
            "registry_version": FEATURE_REGISTRY_VERSION,
            "feature_set": self.feature_set,
            "columns": self.columns,
            "features": [
                {
                    "name": f.name,
                    "entity": f.entity.value,
                    "origin": f.origin.value,
                    "dtype": f.dtype,
                    "index": i,
                    "column": i + 2,
                }
                for i, f in enumerate(self.features)
            ],
            "category_codes": CATEGORY_CODES,
            "label_codes": {label.value: code for label, code in LABEL_CODES.items()},
        }

    @property
    def manifest_hash(self) -> str:
        """sha256 of the manifest file bytes."""
        return sha256_hex(dumps_json(self.manifest))

    @property
    def n_pos(self) -> int:
        return int(self.y.sum())

    @property
    def n_neg(self) -> int:
        return len(self) - self.n_pos

    def select(self, set_name: str) -> "FeatureMatrix":
        """
        Project onto a feature set; rows are unchanged.
        """
        if set_name == self.feature_set:
            return self
        if self.feature_set != "all":
            raise DataError(f"cannot project a {self.feature_set!r} matrix onto {set_name!r}")
        columns = feature_set_columns(set_name, self.features)
        return FeatureMatrix(
            event_ids=self.event_ids,
            app_ids=self.app_ids,
            X=self.X[:, columns],
            y=self.y,
            features=tuple(self.features[c] for c in columns),
            feature_set=set_name,
        )

    def take(self, rows: Union[Sequence[int], np.ndarray]) -> "FeatureMatrix":
        rows = np.asarray(rows, dtype=np.int64)
        return FeatureMatrix(
            event_ids=[self.event_ids[r] for r in rows],
            app_ids=[self.app_ids[r] for r in rows],
            X=self.X[rows],
            y=self.y[rows],
            features=self.features,
            feature_set=self.feature_set,
        )

    def to_csv(self) -> bytes:
        lines = [",".join(self.columns)]
        dtypes = [f.dtype for f in self.features]
        for event_id, app_id, row, label in zip(self.event_ids, self.app_ids, self.X, self.y):
            values = ",".join(format_value(v, d) for v, d in zip(row, dtypes))
            lines.append(f"{event_id},{app_id},{values},{int(label)}")
        return ("\n".join(lines) + "\n").encode("utf-8")

    def write(self, out_dir: Union[str, Path]) -> Dict[str, Path]:
        """
        Write ``matrix.csv`` and ``feature_manifest.json`` into ``out_dir``.
        """
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        paths = {"matrix": out_dir / MATRIX_FILE, "manifest": out_dir / MANIFEST_FILE}
        paths["matrix"].write_bytes(self.to_csv())
        paths["manifest"].write_bytes(dumps_json(self.manifest))
        logger.info(f"Wrote {len(self)} rows x {len(self.features)} features to {paths['matrix']}")
        return paths

    @classmethod
    def read(cls, path: Union[str, Path]) -> "FeatureMatrix":
        """
        Read a matrix directory (or the CSV inside one) written by ``write``.

        Raises:
            InputMissingError: matrix or manifest file missing
            ParseError: malformed rows or a manifest that disagrees with the file
        """
        path = Path(path)
        directory = path if path.is_dir() else path.parent
        csv_path = path if not path.is_dir() else directory / MATRIX_FILE
        manifest_path = directory / MANIFEST_FILE
        for required in (csv_path, manifest_path):
            if not required.exists():
                raise InputMissingError(f"Missing input file {required}")
        return cls.parse(read_text(csv_path), load_json(manifest_path))

    @classmethod
    def parse(cls, text: str, manifest: Mapping) -> "FeatureMatrix":
        features = features_from_manifest(manifest)
        lines = text.split("\n")
        if lines and lines[-1] == "":
            lines.pop()
        if not lines:
            raise ParseError("missing header", line=1)
        header = lines[0].split(",")
        expected = ["event_id", "app_id", *(f.name for f in features), "label"]
        if header != expected:
            raise ParseError("header does not match the feature manifest", line=1)

        event_ids, app_ids, labels = [], [], []
        X = np.empty((len(lines) - 1, len(features)), dtype=np.float64)
        for i, raw in enumerate(lines[1:]):
            line = i + 2
            fields = raw.split(",")
            if len(fields) != len(expected):
                raise ParseError(f"expected {len(expected)} columns, found {len(fields)}", line=line)
            try:
                event_ids.append(int(fields[0]))
            except ValueError:
                raise ParseError(f"cannot parse {fields[0]!r}", line=line, field="event_id") from None
            app_ids.append(fields[1])
            for j, value in enumerate(fields[2:-1]):
                try:
                    X[i, j] = float(value)
                except ValueError:
                    raise ParseError(f"cannot parse {value!r}", line=line, field=features[j].name) from None
            if fields[-1] not in ("0", "1"):
                raise ParseError(f"label must be 0 or 1, found {fields[-1]!r}", line=line, field="label")
            labels.append(int(fields[-1]))
        return cls(
            event_ids=event_ids,
            app_ids=app_ids,
            X=X,
            y=np.asarray(labels, dtype=np.int8),
            features=features,
            feature_set=manifest["feature_set"],
        )


def features_from_manifest(manifest: Mapping) -> Tuple[FeatureSpec, ...]:
    """
    Registry entries named by a manifest, checking that tags and version agree.
    """
    try:
        if manifest["registry_version"] != FEATURE_REGISTRY_VERSION:
            raise ParseError(
                f"feature registry version {manifest['registry_version']} is not {FEATURE_REGISTRY_VERSION}"
            )
        features = []
        for entry in manifest["features"]:
            spec = _REGISTRY.get(entry["name"])
            if spec is None or (spec.entity.value, spec.origin.value) != (entry["entity"], entry["origin"]):
                raise ParseError(f"manifest feature {entry['name']!r} does not match the registry")
            features.append(spec)
        if "feature_set" not in manifest:
            raise ParseError("feature manifest names no feature set")
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed feature manifest: {exc}") from None
    return tuple(features)


def labeled_downloads(log: Iterable[EventRecord], labels: LabelSet) -> List[Tuple[EventRecord, Label]]:
    """
    Download records labeled pos or neg, sorted by event_id; excluded and
    unlabeled records are dropped.
    """
    rows = []
    for record in log:
        if record.kind != EventKind.download:
            continue
        label = labels.label_of(record.event_id)
        if label in LABEL_CODES:
            rows.append((record, label))
    rows.sort(key=lambda r: r[0].event_id)
    return rows


def matrix_from_rows(
    rows: Sequence[Tuple[int, str, Sequence[float], int]],
    set_name: str = "all",
) -> FeatureMatrix:
    """
    Assemble a matrix from ``(event_id, app_id, full feature values, label code)``
    rows, sorted by event_id, then project it onto ``set_name``.
    """
    rows = sorted(rows, key=lambda r: r[0])
    X = np.array([r[2] for r in rows], dtype=np.float64).reshape(len(rows), len(FEATURES))
    matrix = FeatureMatrix(
        event_ids=[r[0] for r in rows],
        app_ids=[r[1] for r in rows],
        X=X,
        y=np.array([r[3] for r in rows], dtype=np.int8),
    )
    return matrix.select(set_name)


def export_matrix(
    log: Sequence[EventRecord],
    labels: LabelSet,
    catalog: Mapping[str, AppCatalogEntry],
    set_name: str = "all",
    window: Optional[Tuple[int, int]] = None,
    profiles: Optional[EntityProfiles] = None,
) -> FeatureMatrix:
    """
    One row per positively or negatively labeled download.

    Profiles are computed over the labeling window unless given.
    """
    feature_set_columns(set_name)
    window = window if window is not None else labels.window
    if profiles is None:
        profiles = build_profiles(log, window)
    rows = [
        (record.event_id, record.app_id, featurize(record, profiles, catalog).values, LABEL_CODES[label])
        for record, label in labeled_downloads(log, labels)
    ]
    matrix = matrix_from_rows(rows, set_name)
    logger.info(f"Exported {len(matrix)} rows ({matrix.n_pos} pos) with feature set {set_name!r}")
    return matrix
