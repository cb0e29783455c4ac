import orjson
import pytest

from fraudlab.core import DataError
from fraudlab.evaluation import (
    AnalysisReport,
    category_distribution,
    coefficient_of_variation,
    comparative_analysis,
    hourly_histogram,
    rating_bin,
    rating_histogram,
    type1_rule_filter,
)
from fraudlab.labeling import AppStatus, LabelSet, build_labels
from fraudlab.records import AppCatalogEntry, Category, EventKind, EventRecord, Source


@pytest.fixture()
def catalog():
    entries = [
        ("fin", Category.Finance, 1.5),
        ("game", Category.Game, 4.8),
        ("tool", Category.Tools, 3.2),
        ("gone", Category.Finance, 2.0),
    ]
    return {a: AppCatalogEntry(app_id=a, category=c, rating=r, release_ts=0) for a, c, r in entries}


@pytest.fixture()
def app_status():
    return {
        "fin": AppStatus.suspicious,
        "game": AppStatus.suspicious,
        "tool": AppStatus.normal,
        "gone": AppStatus.excluded,
    }


def download(event_id, ts):
    return EventRecord(
        event_id=event_id,
        ts=ts,
        kind=EventKind.download,
        device_id="00000000000000a1",
        vendor_verified=True,
        app_id="fin",
        ip_hash="00000000000000ff",
        source=Source.client,
    )


@pytest.mark.parametrize(
    ("rating", "index"),
    [(1.0, 0), (1.99, 0), (2.0, 1), (3.5, 2), (4.0, 3), (4.5, 3), (5.0, 3)],
)
def test_rating_bin(rating, index):
    assert rating_bin(rating) == index


def test_rating_bin_range():
    with pytest.raises(DataError):
        rating_bin(0.5)


def test_category_distribution(catalog, app_status):
    dist = category_distribution(catalog, app_status)
    finance, game, tools = (c.code for c in (Category.Finance, Category.Game, Category.Tools))
    assert dist["suspicious"][finance] == dist["suspicious"][game] == 0.5
    assert dist["normal"][tools] == 1.0
    assert dist["all"][finance] == 0.5
    assert sum(dist["all"]) == pytest.approx(1.0)
    assert len(dist["all"]) == len(Category)


def test_rating_histogram(catalog, app_status):
    hist = rating_histogram(catalog, app_status)
    assert hist == {"suspicious": [0.5, 0.0, 0.0, 0.5], "normal": [0.0, 0.0, 1.0, 0.0]}

    with pytest.raises(DataError, match="missing from the catalog"):
        rating_histogram({}, app_status)


def test_hourly_histogram():
    hist = hourly_histogram([(download(0, 3600), True), (download(1, 86400 + 3599), True), (download(2, 0), False)])
    assert hist["positive"][0] == 0.5
    assert hist["positive"][1] == 0.5
    assert hist["negative"][0] == 1.0
    assert hourly_histogram([])["positive"] is None


def test_coefficient_of_variation():
    assert coefficient_of_variation([0.25] * 4) == 0.0
    assert coefficient_of_variation([0.0, 0.5, 0.0, 0.5]) == pytest.approx(1.0)
    assert coefficient_of_variation(None) is None


def test_empty_groups_are_undefined(catalog):
    report = AnalysisReport(
        categories=category_distribution(catalog, {"fin": AppStatus.suspicious}),
        ratings=rating_histogram(catalog, {"fin": AppStatus.suspicious}),
        hourly=hourly_histogram([(download(0, 0), True)]),
    )
    assert report.rating_csv().splitlines() == [
        "bin_low,bin_high,suspicious,normal",
        "1,2,1.0,undefined",
        "2,3,0.0,undefined",
        "3,4,0.0,undefined",
        "4,5,0.0,undefined",
    ]
    assert report.hourly_csv().splitlines()[1] == "0,1.0,undefined"
    assert report.category_csv().splitlines()[1] == "Finance,1.0,undefined,0.5"
    doc = report.as_dict()
    assert doc["ratings"]["normal"] == "undefined"
    assert doc["summary"]["rating_mode_normal"] == "undefined"
    assert doc["summary"]["rating_mode_suspicious"] == [1, 2]


def test_comparative_analysis(small_run, tmp_path):
    labels = build_labels(small_run.events)
    flags = type1_rule_filter(small_run.events)
    report = comparative_analysis(small_run.events, small_run.catalog, labels, flags=flags)
    paths = report.write(tmp_path)

    categories = paths["categories"].read_text().splitlines()
    assert categories[0] == "category,suspicious_share,normal_share,all_share"
    assert [line.split(",")[0] for line in categories[1:]] == [c.value for c in Category]
    assert len(paths["ratings"].read_text().splitlines()) == 5
    hourly = paths["hourly"].read_text().splitlines()
    assert hourly[0] == "hour,positive,negative"
    assert len(hourly) == 25

    doc = orjson.loads(paths["report"].read_bytes())
    assert doc["filter_hits"]["portal_source"] == 150
    assert 0.0 <= doc["summary"]["finance_game_share_all"] <= 1.0
    assert sum(report.hourly["positive"]) == pytest.approx(1.0)
    assert sum(report.hourly["negative"]) == pytest.approx(1.0)


def test_analysis_by_scores(small_run):
    labels = build_labels(small_run.events)
    scores = {r.event_id: 1.0 for r in small_run.events if r.kind == EventKind.download}
    report = comparative_analysis(small_run.events, small_run.catalog, labels, scores=scores)
    assert report.hourly["negative"] is None
    assert report.filter_hits == {}


def test_analysis_needs_app_statuses(small_run):
    empty = LabelSet(frozenset(), frozenset(), frozenset(), {})
    with pytest.raises(DataError, match="no app statuses"):
        comparative_analysis(small_run.events, small_run.catalog, empty)
