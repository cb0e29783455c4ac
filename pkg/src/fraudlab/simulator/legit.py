"""
Regular-user traffic.
"""
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from fraudlab.records.models import EventKind, Source
from fraudlab.simulator.catalog import SimCatalog
from fraudlab.simulator.config import SimConfig
from fraudlab.simulator.diurnal import sample_diurnal
from fraudlab.simulator.injectors import DAY, DraftEvent, Injection, Window
from fraudlab.simulator.rng import TokenFactory


@dataclass
class DevicePool:
    """
    Vendor-verified devices of regular users.

    ``activation_day`` is the first download-period day a device may
    download on; it is 0 for established devices, which were active
    during the history period already.
    """

    device_ids: List[str]
    home_ips: List[str]
    activity: np.ndarray
    is_new: np.ndarray
    activation_day: np.ndarray

    def __len__(self) -> int:
        return len(self.device_ids)


def build_devices(config: SimConfig, rng: np.random.Generator, tokens: TokenFactory, n_days: int) -> DevicePool:
    """
    Devices with lognormal activity levels; a ``new_device_fraction`` of them
    are first activated during the download period.
    """
    n = config.n_devices
    activity = rng.lognormal(0.0, config.activity_sigma, size=n)
    is_new = rng.random(n) < config.new_device_fraction
    activation_day = np.where(is_new, rng.integers(0, max(1, n_days - 1), size=n), 0)
    return DevicePool(
        device_ids=tokens.tokens("device", n),
        home_ips=tokens.tokens("ip-home", n),
        activity=activity / activity.sum(),
        is_new=is_new,
        activation_day=activation_day,
    )


def mobile_ip_pool(tokens: TokenFactory, n_devices: int) -> List[str]:
    """Shared mobile-network addresses, one per 20 devices."""
    return tokens.tokens("ip-mobile", max(1, n_devices // 20))


def app_popularity(config: SimConfig, rng: np.random.Generator, catalog: SimCatalog) -> Tuple[List[str], np.ndarray]:
    """
    Download probabilities of regular users over the catalog.

    Regular apps follow a Zipf law over a random ranking; bot-targeted apps
    share ``target_app_legit_share`` evenly; farm apps get no regular users.
    """
    regular = catalog.regular_apps
    ranks = rng.permutation(len(regular)) + 1
    zipf = 1.0 / ranks.astype(float) ** config.zipf_exponent
    targets = catalog.target_apps
    share = config.target_app_legit_share if targets else 0.0
    weights = np.concatenate([zipf / zipf.sum() * (1.0 - share), np.full(len(targets), share / max(1, len(targets)))])
    return list(regular) + list(targets), weights / weights.sum()


def established_apps(
    catalog: SimCatalog, apps: List[str], app_weights: np.ndarray, ts: int
) -> Tuple[List[int], np.ndarray]:
    """
    Indices into ``apps`` of the regular apps released by ``ts`` and their
    renormalized weights. Without any, the earliest regular release stands in.
    """
    regular = set(catalog.regular_apps)
    index = [i for i, app in enumerate(apps) if app in regular]
    released = [i for i, ok in zip(index, catalog.released_mask([apps[i] for i in index], ts)) if ok]
    if not released:
        released = [min(index, key=lambda i: catalog.entries[apps[i]].release_ts)]
    weights = app_weights[released]
    return released, weights / weights.sum()


def generate_legit(
    config: SimConfig,
    rng: np.random.Generator,
    catalog: SimCatalog,
    devices: DevicePool,
    apps: List[str],
    app_weights: np.ndarray,
    window: Window,
    tokens: TokenFactory,
) -> Injection:
    """
    Regular users: one browse event activating every device, then
    ``legit_downloads`` diurnal client downloads with optional preceding
    search/view, following install and later update.
    """
    n = config.legit_downloads
    a = config.night_attenuation
    mobile_ips = mobile_ip_pool(tokens, len(devices))
    n_mobile = len(mobile_ips)

    device = rng.choice(len(devices), size=n, p=devices.activity)
    low = devices.activation_day[device]
    days = low + np.floor(rng.random(n) * (window.n_days - low)).astype(np.int64)
    ts = sample_diurnal(rng, window.start + days * DAY, a)

    # apps not yet released at ts are redrawn among the established regular apps
    app_idx = rng.choice(len(apps), size=n, p=app_weights)
    release = np.array([catalog.entries[app].release_ts for app in apps], dtype=np.int64)
    established, established_weights = established_apps(catalog, apps, app_weights, config.start_ts)
    redraw = np.asarray(established)[rng.choice(len(established), size=n, p=established_weights)]
    app_idx = np.where(release[app_idx] <= ts, app_idx, redraw)

    use_home = rng.random(n) < config.home_ip_probability
    mobile = rng.integers(0, n_mobile, size=n)

    dev_ids = [devices.device_ids[d] for d in device]
    app_ids = [apps[i] for i in app_idx]
    ips = [devices.home_ips[d] if h else mobile_ips[m] for d, h, m in zip(device, use_home, mobile)]

    events = [
        DraftEvent(int(t), EventKind.download, d, True, app, ip, Source.client)
        for t, d, app, ip in zip(ts, dev_ids, app_ids, ips)
    ]

    for kind, p, (lo, hi), sign in (
        (EventKind.search, config.search_probability, (10, 600), -1),
        (EventKind.view, config.view_probability, (5, 300), -1),
        (EventKind.install, config.install_probability, (30, 900), 1),
        (EventKind.update, config.update_probability, (DAY, 5 * DAY), 1),
    ):
        mask = rng.random(n) < p
        offsets = rng.integers(lo, hi, size=n)
        source = Source.update if kind == EventKind.update else Source.client
        for i in np.flatnonzero(mask):
            at = int(ts[i]) + sign * int(offsets[i])
            if at >= window.end:
                continue
            events.append(DraftEvent(max(0, at), kind, dev_ids[i], True, app_ids[i], ips[i], source))

    events.extend(
        _activations(config, rng, devices, [apps[i] for i in established], established_weights, ts, device)
    )
    return Injection(events=events)


def _activations(
    config: SimConfig,
    rng: np.random.Generator,
    devices: DevicePool,
    apps: List[str],
    app_weights: np.ndarray,
    download_ts: np.ndarray,
    download_device: np.ndarray,
) -> List[DraftEvent]:
    """
    The first event of every device: a search or view on the first history
    day for established devices, shortly before the first download for new
    ones (or on their activation day if they never download).
    """
    n = len(devices)
    first_download = np.full(n, np.iinfo(np.int64).max, dtype=np.int64)
    np.minimum.at(first_download, download_device, download_ts)

    history_day = sample_diurnal(rng, np.full(n, config.start_ts, dtype=np.int64), config.night_attenuation)
    activation_day = sample_diurnal(
        rng, config.download_start + devices.activation_day * DAY, config.night_attenuation
    )
    lead = rng.integers(60, 1800, size=n)
    never = first_download == np.iinfo(np.int64).max
    new_ts = np.where(never, activation_day, first_download - lead)
    ts = np.where(devices.is_new, new_ts, history_day)

    app_idx = rng.choice(len(apps), size=n, p=app_weights)
    kinds = np.where(rng.random(n) < 0.5, 0, 1)
    browse = (EventKind.search, EventKind.view)
    return [
        DraftEvent(max(0, int(t)), browse[k], d, True, apps[a], ip, Source.client)
        for t, k, d, a, ip in zip(ts, kinds, devices.device_ids, app_idx, devices.home_ips)
    ]
