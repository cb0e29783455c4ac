import numpy as np
import pytest

from fraudlab.core import DataError
from fraudlab.evaluation import SplitConfig, app_split, check_app_disjoint, record_split, split_matrix
from fraudlab.features import export_matrix
from fraudlab.labeling import build_labels


@pytest.fixture()
def apps():
    # four positive and six negative apps, three rows each
    app_ids = [f"a{i}" for i in range(10) for _ in range(3)]
    y = np.array([1 if int(a[1:]) < 4 else 0 for a in app_ids])
    return app_ids, y


def test_app_split(apps):
    app_ids, y = apps
    train, test = app_split(app_ids, y, SplitConfig(test_fraction=0.5, seed=1))
    assert sorted(np.concatenate([train, test]).tolist()) == list(range(30))
    assert train.tolist() == sorted(train.tolist())
    train_apps = {app_ids[i] for i in train}
    test_apps = {app_ids[i] for i in test}
    assert not train_apps & test_apps
    # stratified: half of the positive and half of the negative apps
    assert sum(a in test_apps for a in ("a0", "a1", "a2", "a3")) == 2
    assert len(test_apps) == 5
    assert set(y[train]) == set(y[test]) == {0, 1}


def test_app_split_is_deterministic(apps):
    app_ids, y = apps
    first = app_split(app_ids, y, SplitConfig(seed=4))
    second = app_split(app_ids, y, SplitConfig(seed=4))
    assert [a.tolist() for a in first] == [a.tolist() for a in second]


def test_small_strata():
    # one positive app stays in train; two negatives always split one-one
    app_ids = ["p", "n1", "n2"]
    train, test = app_split(app_ids, np.array([1, 0, 0]), SplitConfig(test_fraction=0.1))
    assert [app_ids[i] for i in test] in (["n1"], ["n2"])
    assert 0 in train


def test_unstratified_split(apps):
    app_ids, y = apps
    train, test = app_split(app_ids, y, SplitConfig(test_fraction=0.3, stratify=False))
    assert len({app_ids[i] for i in test}) == 3


def test_check_app_disjoint():
    check_app_disjoint(["a", "b"], ["c"])
    with pytest.raises(DataError, match="1 apps appear in both"):
        check_app_disjoint(["a", "b"], ["b", "c"])


def test_split_matrix(small_run):
    labels = build_labels(small_run.events)
    matrix = export_matrix(small_run.events, labels, small_run.catalog)
    train, test = split_matrix(matrix)
    assert len(train) + len(test) == len(matrix)
    assert not set(train.app_ids) & set(test.app_ids)
    assert train.n_pos and train.n_neg and test.n_pos and test.n_neg
    assert train.manifest_hash == test.manifest_hash == matrix.manifest_hash


def test_record_split():
    y = np.array([1] * 10 + [0] * 20)
    train, test = record_split(y, 0.3, seed=0)
    assert y[test].sum() == 3
    assert (y[test] == 0).sum() == 6
    assert sorted(np.concatenate([train, test]).tolist()) == list(range(30))
    assert record_split(y, 0.3, seed=0)[1].tolist() == test.tolist()


def test_split_config_validation():
    with pytest.raises(ValueError):
        SplitConfig(test_fraction=1.0)
    with pytest.raises(ValueError):
        SplitConfig(validation="kfold")
