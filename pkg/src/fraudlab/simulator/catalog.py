"""
App catalog generation.
"""
from dataclasses import dataclass
from typing import Dict, List

import numpy as np

from fraudlab.records.models import AppCatalogEntry, Category
from fraudlab.simulator.config import RatingParams, SimConfig

DAY = 86400

# regular apps were released during the two years before the simulated span
REGULAR_RELEASE_DAYS = (730, 8)


@dataclass(frozen=True)
class SimCatalog:
    """
    The generated catalog plus the simulator-side roles of its apps.
    """

    entries: Dict[str, AppCatalogEntry]
    regular_apps: List[str]
    target_apps: List[str]
    farm_apps: List[str]

    def released_mask(self, apps: List[str], ts: int) -> np.ndarray:
        """Which of ``apps`` are released at ``ts``."""
        return np.array([self.entries[app].release_ts <= ts for app in apps], dtype=bool)


def quota(mix: Dict[Category, float], n: int) -> List[Category]:
    """
    Exactly ``n`` categories distributed by largest-remainder rounding of
    ``mix``, in category declaration order.
    """
    shares = np.array([mix.get(c, 0.0) for c in Category]) * n
    counts = np.floor(shares).astype(int)
    remainders = shares - counts
    # stable ordering keeps ties on the earlier category
    for index in np.argsort(-remainders, kind="stable")[: n - counts.sum()]:
        counts[index] += 1
    return [c for c, k in zip(Category, counts) for _ in range(k)]


def boosted_mix(mix: Dict[Category, float], boost: float) -> Dict[Category, float]:
    """
    Re-weight ``mix`` so that Finance and Game together carry ``boost``; both
    groups keep their internal proportions.
    """
    suspicious = (Category.Finance, Category.Game)
    inside = sum(mix.get(c, 0.0) for c in suspicious)
    outside = 1.0 - inside
    boosted = {}
    for category in Category:
        p = mix.get(category, 0.0)
        if category in suspicious:
            boosted[category] = boost * (p / inside if inside else 1 / len(suspicious))
        else:
            boosted[category] = (1.0 - boost) * (p / outside if outside else 0.0)
    return boosted


def draw_ratings(rng: np.random.Generator, params: RatingParams, n: int) -> np.ndarray:
    ratings = rng.normal(params.mean, params.std, size=n)
    return np.round(np.clip(ratings, 1.0, 5.0), 1)


def build_catalog(config: SimConfig, rng: np.random.Generator) -> SimCatalog:
    """
    Generate the catalog. Regular apps follow ``category_mix`` and a
    ``new_app_fraction`` of them is released during the download period; apps targeted
    by download bots follow the Finance/Game boosted mix and, with
    ``co_rating_boost``, the fraud rating distribution. Category shares are
    exact quotas, so they do not fluctuate with the seed.
    """
    n_apps = config.n_apps
    app_ids = [f"{config.app_id_prefix}{i}" for i in range(n_apps)]
    order = rng.permutation(n_apps)
    target_idx = sorted(order[: config.n_target_apps].tolist())
    farm_idx = sorted(order[config.n_target_apps : config.n_special_apps].tolist())
    regular_idx = sorted(order[config.n_special_apps :].tolist())

    categories: Dict[int, Category] = {}
    ratings: Dict[int, float] = {}
    releases: Dict[int, int] = {}

    regular_categories = quota(config.category_mix, len(regular_idx))
    for i, c in zip(regular_idx, rng.permutation(np.array(regular_categories, dtype=object))):
        categories[i] = c
    for i, r in zip(regular_idx, draw_ratings(rng, config.normal_rating, len(regular_idx))):
        ratings[i] = float(r)
    oldest, newest = REGULAR_RELEASE_DAYS
    # releases during the download period share the span of the bot targets
    first = config.download_start - 3 * DAY
    last = max(first + 1, config.end_ts - 7 * DAY)
    fresh = rng.random(len(regular_idx)) < config.new_app_fraction
    old_release = rng.integers(config.start_ts - oldest * DAY, config.start_ts - newest * DAY, size=len(regular_idx))
    new_release = rng.integers(first, last, size=len(regular_idx))
    for i, t in zip(regular_idx, np.where(fresh, new_release, old_release)):
        releases[i] = int(t)

    if target_idx:
        target_mix = boosted_mix(config.category_mix, config.suspicious_category_boost)
        target_categories = quota(target_mix, len(target_idx))
        for i, c in zip(target_idx, rng.permutation(np.array(target_categories, dtype=object))):
            categories[i] = c
        rating_params = config.fraud_rating if config.type2.co_rating_boost else config.normal_rating
        for i, r in zip(target_idx, draw_ratings(rng, rating_params, len(target_idx))):
            ratings[i] = float(r)
        # spread over the download period, ending a week before the horizon
        for i, t in zip(target_idx, rng.integers(first, last, size=len(target_idx))):
            releases[i] = int(t)

    for i in farm_idx:
        categories[i] = Category(rng.choice(np.array(list(Category), dtype=object)))
        ratings[i] = float(draw_ratings(rng, config.normal_rating, 1)[0])
        releases[i] = config.start_ts - 30 * DAY

    entries = {
        app_ids[i]: AppCatalogEntry(
            app_id=app_ids[i], category=categories[i], rating=ratings[i], release_ts=max(0, releases[i])
        )
        for i in range(n_apps)
    }
    return SimCatalog(
        entries=entries,
        regular_apps=[app_ids[i] for i in regular_idx],
        target_apps=[app_ids[i] for i in target_idx],
        farm_apps=[app_ids[i] for i in farm_idx],
    )
