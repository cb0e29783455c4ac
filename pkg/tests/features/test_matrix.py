import numpy as np
import pytest

from fraudlab.core import DataError, InputMissingError, ParseError
from fraudlab.features import MANIFEST_FILE, MATRIX_FILE, FeatureMatrix, export_matrix, labeled_downloads
from fraudlab.labeling import build_labels
from fraudlab.utils import dump_json, load_json


@pytest.fixture(scope="module")
def labeled(small_run):
    return build_labels(small_run.events)


@pytest.fixture(scope="module")
def matrix(small_run, labeled):
    return export_matrix(small_run.events, labeled, small_run.catalog)


def test_rows(matrix, labeled):
    assert len(matrix) == len(labeled.positive_event_ids) + len(labeled.negative_event_ids)
    assert matrix.event_ids == sorted(matrix.event_ids)
    assert matrix.n_pos == len(labeled.positive_event_ids)
    assert matrix.n_neg == len(labeled.negative_event_ids)
    assert matrix.X.shape == (len(matrix), 21)
    assert np.isfinite(matrix.X).all()
    positives = {e for e, y in zip(matrix.event_ids, matrix.y) if y == 1}
    assert positives == labeled.positive_event_ids


def test_labeled_downloads(small_run, labeled):
    rows = labeled_downloads(small_run.events, labeled)
    assert not {r.event_id for r, _ in rows} & labeled.excluded_event_ids


def test_write_and_read(matrix, tmp_path):
    paths = matrix.write(tmp_path)
    assert paths["matrix"] == tmp_path / MATRIX_FILE
    restored = FeatureMatrix.read(tmp_path)
    assert restored.event_ids == matrix.event_ids
    assert restored.app_ids == matrix.app_ids
    np.testing.assert_array_equal(restored.X, matrix.X)
    np.testing.assert_array_equal(restored.y, matrix.y)
    assert restored.manifest_hash == matrix.manifest_hash
    # rewriting gives the same bytes
    restored.write(tmp_path / "again")
    assert (tmp_path / "again" / MATRIX_FILE).read_bytes() == paths["matrix"].read_bytes()
    assert FeatureMatrix.read(tmp_path / MATRIX_FILE).event_ids == matrix.event_ids


def test_manifest(matrix):
    manifest = matrix.manifest
    assert manifest["columns"][0] == "event_id"
    assert manifest["columns"][-1] == "label"
    assert manifest["features"][0] == {
        "name": "is_new_device",
        "entity": "device",
        "origin": "new",
        "dtype": "bool",
        "index": 0,
        "column": 2,
    }
    assert manifest["label_codes"] == {"pos": 1, "neg": 0}
    assert manifest["category_codes"]["Finance"] == 0


def test_select(matrix):
    device = matrix.select("device")
    assert device.X.shape == (len(matrix), 8)
    assert device.feature_set == "device"
    assert device.manifest_hash != matrix.manifest_hash
    assert matrix.select("all") is matrix
    with pytest.raises(DataError):
        device.select("app")


def test_take(matrix):
    part = matrix.take([2, 0])
    assert part.event_ids == [matrix.event_ids[2], matrix.event_ids[0]]
    np.testing.assert_array_equal(part.X[1], matrix.X[0])


def test_feature_set_export(small_run, labeled, matrix):
    app = export_matrix(small_run.events, labeled, small_run.catalog, set_name="app")
    np.testing.assert_array_equal(app.X, matrix.select("app").X)
    with pytest.raises(DataError):
        export_matrix(small_run.events, labeled, small_run.catalog, set_name="vendor")


def test_read_errors(matrix, tmp_path):
    with pytest.raises(InputMissingError):
        FeatureMatrix.read(tmp_path)

    matrix.write(tmp_path)
    text = (tmp_path / MATRIX_FILE).read_text()
    lines = text.split("\n")
    bad_label = "\n".join([lines[0], lines[1].rsplit(",", 1)[0] + ",2", *lines[2:]])
    with pytest.raises(ParseError) as exc:
        FeatureMatrix.parse(bad_label, matrix.manifest)
    assert (exc.value.line, exc.value.field) == (2, "label")

    with pytest.raises(ParseError, match="header"):
        FeatureMatrix.parse(text, matrix.select("device").manifest)

    manifest = load_json(tmp_path / MANIFEST_FILE)
    manifest["registry_version"] = 99
    dump_json(manifest, tmp_path / MANIFEST_FILE)
    with pytest.raises(ParseError, match="registry version"):
        FeatureMatrix.read(tmp_path)
