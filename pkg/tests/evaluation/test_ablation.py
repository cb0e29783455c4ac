import orjson
import pytest

from fraudlab.core import ConfigError, DataError, ManifestMismatchError
from fraudlab.evaluation import (
    ABLATION_SETS,
    ConfusionMetrics,
    LabeledLog,
    PRCurve,
    SetResult,
    SplitConfig,
    ablate,
    evaluate_model,
    fit,
    fraud_type_auc,
    run_ablation,
    second_run_config,
    split_matrix,
)
from fraudlab.features import export_matrix
from fraudlab.labeling import build_labels
from fraudlab.records import FraudType
from fraudlab.simulator import simulate
from fraudlab.trees import TrainParams

PARAMS = TrainParams(n_trees=10, max_depth=3)


@pytest.fixture(scope="module")
def first(small_run):
    return LabeledLog(small_run.events, small_run.catalog, build_labels(small_run.events))


@pytest.fixture(scope="module")
def sides(first):
    matrix = export_matrix(first.log, first.labels, first.catalog)
    return split_matrix(matrix, SplitConfig(seed=2))


@pytest.fixture(scope="module")
def report(sides):
    return run_ablation(*sides, params=PARAMS, split={"validation": "app_split"})


def test_table_row_with_undefined_metrics():
    row = SetResult(
        feature_set="app",
        n_features=10,
        confusion=ConfusionMetrics(tp=0, fp=0, tn=3, fn=1, threshold=0.5),
        auc=0.75,
        pr=PRCurve([0.9], [1.0], [1.0]),
    )
    assert row.table_row() == "app,10,undefined,0.0,undefined,0.75,0.75"
    assert row.as_dict()["precision"] == "undefined"


def test_report_layout(report, sides):
    assert [row.feature_set for row in report.rows] == list(ABLATION_SETS)
    assert report["device"].n_features == 8
    assert report["app"].n_features == 10
    assert report["all"].n_features == 21
    assert report["new"].n_features + report["previous"].n_features == 21
    with pytest.raises(KeyError):
        report["ip"]

    train, test = sides
    assert report.class_balance["test"] == {
        "n_pos": test.n_pos,
        "n_neg": test.n_neg,
        "n_apps": len(set(test.app_ids)),
    }
    assert report.seed == PARAMS.seed
    for row in report.rows:
        assert 0.0 <= row.auc <= 1.0
        assert row.confusion.n == len(test)


def test_report_files(report, tmp_path):
    paths = report.write(tmp_path)
    lines = paths["table"].read_text().splitlines()
    assert lines[0] == "feature_set,n_features,precision,recall,f1,auc,accuracy"
    assert [line.split(",")[0] for line in lines[1:]] == list(ABLATION_SETS)

    doc = orjson.loads(paths["report"].read_bytes())
    assert [s["feature_set"] for s in doc["feature_sets"]] == list(ABLATION_SETS)
    assert doc["params"]["n_trees"] == 10
    assert doc["split"] == {"validation": "app_split"}


def test_parallel_ablation_matches_serial(sides):
    serial = run_ablation(*sides, feature_sets=("device", "app"), params=PARAMS)
    parallel = run_ablation(*sides, feature_sets=("device", "app"), params=PARAMS, n_workers=2)
    assert parallel.as_dict() == serial.as_dict()


def test_ablation_rejects_shared_apps(sides):
    train, _ = sides
    with pytest.raises(DataError, match="appear in both"):
        run_ablation(train, train, params=PARAMS)


def test_model_bound_to_its_feature_set(sides):
    train, test = sides
    model = fit(train.select("device"), PARAMS)
    assert model.feature_names == list(train.select("device").feature_names)
    evaluate_model(model, test.select("device"))
    with pytest.raises(ManifestMismatchError):
        evaluate_model(model, test.select("app"))


def test_ablate_app_split(first):
    report = ablate(first, SplitConfig(seed=2), PARAMS, feature_sets=("all",))
    assert [row.feature_set for row in report.rows] == ["all"]
    assert report.split["validation"] == "app_split"


def test_second_run(small_config, first):
    split = SplitConfig(validation="second_run")
    config = second_run_config(small_config, split)
    assert config.seed == 20190101
    assert config.app_id_prefix == "jan_"
    assert config.n_apps == small_config.n_apps

    with pytest.raises(ConfigError, match="second labeled log"):
        ablate(first, split, PARAMS)

    run = simulate(config)
    second = LabeledLog(run.events, run.catalog, build_labels(run.events))
    report = ablate(first, split, PARAMS, second=second, feature_sets=("device",))
    train = export_matrix(first.log, first.labels, first.catalog)
    assert report.class_balance["train"]["n_pos"] == train.n_pos
    assert not set(train.app_ids) & {r.app_id for r in run.events}
    assert report.split["second_run_seed"] == 20190101


def test_second_run_needs_new_prefix(small_config):
    with pytest.raises(ConfigError, match="different"):
        second_run_config(small_config, SplitConfig(validation="second_run", second_run_app_prefix="app_"))


@pytest.mark.parametrize("fraud_type", [FraudType.type1, FraudType.type2, FraudType.type3])
def test_fraud_type_auc(small_run, fraud_type):
    score = fraud_type_auc(small_run.events, small_run.catalog, small_run.ground_truth, fraud_type, PARAMS)
    assert 0.0 <= score <= 1.0


def test_fraud_type_auc_needs_both_kinds(small_run):
    truth = [g for g in small_run.ground_truth if g.fraud_type != FraudType.type3]
    with pytest.raises(DataError, match="type3"):
        fraud_type_auc(small_run.events, small_run.catalog, truth, FraudType.type3, PARAMS)
