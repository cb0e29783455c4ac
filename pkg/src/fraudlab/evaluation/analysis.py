"""
Comparative analysis of suspicious and normal apps and downloads: category
shares, rating histograms and the hour-of-day download profile.
"""
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from fraudlab.core import DataError
from fraudlab.evaluation.metrics import UNDEFINED, metric_value
from fraudlab.evaluation.rule_filter import FlagRecord, filter_hits
from fraudlab.labeling.models import AppStatus, Label, LabelSet
from fraudlab.records.models import AppCatalogEntry, Category, EventKind, EventRecord
from fraudlab.utils import dump_json

logger = logging.getLogger(__name__)

CATEGORY_FILE = "category_dist.csv"
RATING_FILE = "rating_hist.csv"
HOURLY_FILE = "hourly_hist.csv"
ANALYSIS_FILE = "analysis_report.json"

# [low, high) except the last bin, which includes 5
RATING_BINS: Tuple[Tuple[int, int], ...] = ((1, 2), (2, 3), (3, 4), (4, 5))
MONETIZING_CATEGORIES = (Category.Finance, Category.Game)

Histogram = Optional[List[float]]


def rating_bin(rating: float) -> int:
    if not 1.0 <= rating <= 5.0:
        raise DataError(f"rating {rating} outside [1, 5]")
    return min(int(rating) - 1, len(RATING_BINS) - 1)


def normalize(counts: Sequence[float]) -> Histogram:
    """Counts scaled to sum to 1; None when there is nothing to count."""
    total = float(sum(counts))
    if total == 0:
        return None
    return [c / total for c in counts]


def coefficient_of_variation(histogram: Histogram) -> Optional[float]:
    if histogram is None:
        return None
    values = np.asarray(histogram, dtype=np.float64)
    return float(values.std() / values.mean())


def mode_bin(histogram: Histogram) -> Optional[Tuple[int, int]]:
    if histogram is None:
        return None
    return RATING_BINS[int(np.argmax(histogram))]


def category_distribution(
    catalog: Mapping[str, AppCatalogEntry], app_status: Mapping[str, AppStatus]
) -> Dict[str, Histogram]:
    """
    Category shares among suspicious apps, normal apps and the whole catalog.
    """
    groups: Dict[str, List[int]] = {name: [0] * len(Category) for name in ("suspicious", "normal", "all")}
    for app_id, entry in catalog.items():
        code = entry.category.code
        groups["all"][code] += 1
        status = app_status.get(app_id)
        if status == AppStatus.suspicious:
            groups["suspicious"][code] += 1
        elif status == AppStatus.normal:
            groups["normal"][code] += 1
    return {name: normalize(counts) for name, counts in groups.items()}


def rating_histogram(
    catalog: Mapping[str, AppCatalogEntry], app_status: Mapping[str, AppStatus]
) -> Dict[str, Histogram]:
    counts = {"suspicious": [0] * len(RATING_BINS), "normal": [0] * len(RATING_BINS)}
    for app_id, status in app_status.items():
        if status.value in counts:
            entry = catalog.get(app_id)
            if entry is None:
                raise DataError(f"app {app_id} is missing from the catalog")
            counts[status.value][rating_bin(entry.rating)] += 1
    return {name: normalize(c) for name, c in counts.items()}


def hourly_histogram(downloads: Iterable[Tuple[EventRecord, bool]]) -> Dict[str, Histogram]:
    """
    Share of positive and negative downloads per UTC hour of day.
    """
    counts = {"positive": [0] * 24, "negative": [0] * 24}
    for record, positive in downloads:
        counts["positive" if positive else "negative"][(record.ts % 86400) // 3600] += 1
    return {name: normalize(c) for name, c in counts.items()}


def _share(histogram: Histogram, categories: Iterable[Category]) -> Optional[float]:
    if histogram is None:
        return None
    return float(sum(histogram[c.code] for c in categories))


def _cells(table: Dict[str, Histogram], groups: Sequence[str], index: int) -> List[str]:
    return [repr(float(table[g][index])) if table[g] is not None else UNDEFINED for g in groups]


@dataclass
class AnalysisReport:
    """
    The three comparative distributions plus the filter hits. A histogram of
    an empty group is None and is written as ``undefined``.
    """

    categories: Dict[str, Histogram]
    ratings: Dict[str, Histogram]
    hourly: Dict[str, Histogram]
    filter_hits: Dict[str, int] = field(default_factory=dict)

    @property
    def summary(self) -> Dict:
        suspicious_mode = mode_bin(self.ratings["suspicious"])
        normal_mode = mode_bin(self.ratings["normal"])
        return {
            "finance_game_share_suspicious": _share(self.categories["suspicious"], MONETIZING_CATEGORIES),
            "finance_game_share_all": _share(self.categories["all"], MONETIZING_CATEGORIES),
            "rating_mode_suspicious": list(suspicious_mode) if suspicious_mode else None,
            "rating_mode_normal": list(normal_mode) if normal_mode else None,
            "hourly_cv_positive": coefficient_of_variation(self.hourly["positive"]),
            "hourly_cv_negative": coefficient_of_variation(self.hourly["negative"]),
        }

    def category_csv(self) -> str:
        lines = ["category,suspicious_share,normal_share,all_share"]
        for category in Category:
            cells = _cells(self.categories, ("suspicious", "normal", "all"), category.code)
            lines.append(",".join([category.value, *cells]))
        return "\n".join(lines) + "\n"

    def rating_csv(self) -> str:
        lines = ["bin_low,bin_high,suspicious,normal"]
        for i, (low, high) in enumerate(RATING_BINS):
            lines.append(",".join([str(low), str(high), *_cells(self.ratings, ("suspicious", "normal"), i)]))
        return "\n".join(lines) + "\n"

    def hourly_csv(self) -> str:
        lines = ["hour,positive,negative"]
        for hour in range(24):
            lines.append(",".join([str(hour), *_cells(self.hourly, ("positive", "negative"), hour)]))
        return "\n".join(lines) + "\n"

    def as_dict(self) -> Dict:
        def undefined(table):
            return {k: metric_value(v) for k, v in table.items()}

        summary = {k: metric_value(v) for k, v in self.summary.items()}
        return {
            "categories": undefined(self.categories),
            "category_names": [c.value for c in Category],
            "ratings": undefined(self.ratings),
            "rating_bins": [list(b) for b in RATING_BINS],
            "hourly": undefined(self.hourly),
            "filter_hits": self.filter_hits,
            "summary": summary,
        }

    def write(self, out_dir: Union[str, Path]) -> Dict[str, Path]:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        paths = {
            "categories": out_dir / CATEGORY_FILE,
            "ratings": out_dir / RATING_FILE,
            "hourly": out_dir / HOURLY_FILE,
            "report": out_dir / ANALYSIS_FILE,
        }
        paths["categories"].write_text(self.category_csv())
        paths["ratings"].write_text(self.rating_csv())
        paths["hourly"].write_text(self.hourly_csv())
        dump_json(self.as_dict(), paths["report"])
        return paths


def comparative_analysis(
    log: Sequence[EventRecord],
    catalog: Mapping[str, AppCatalogEntry],
    labels: LabelSet,
    scores: Optional[Mapping[int, float]] = None,
    threshold: float = 0.5,
    flags: Optional[Sequence[FlagRecord]] = None,
) -> AnalysisReport:
    """
    Compare suspicious with normal apps and positive with negative downloads.

    App groups come from the label set's app statuses. Downloads are split by
    their labels, or by ``score >= threshold`` when model scores are given.
    """
    app_status = {app_id: status.status for app_id, status in labels.app_status.items()}
    if not app_status:
        raise DataError("label set carries no app statuses")
    downloads = []
    for record in log:
        if record.kind != EventKind.download:
            continue
        if scores is not None:
            if record.event_id in scores:
                downloads.append((record, scores[record.event_id] >= threshold))
            continue
        label = labels.label_of(record.event_id)
        if label in (Label.pos, Label.neg):
            downloads.append((record, label == Label.pos))
    report = AnalysisReport(
        categories=category_distribution(catalog, app_status),
        ratings=rating_histogram(catalog, app_status),
        hourly=hourly_histogram(downloads),
        filter_hits=filter_hits(flags) if flags is not None else {},
    )
    logger.info(f"Analyzed {len(app_status)} apps and {len(downloads)} downloads")
    return report
