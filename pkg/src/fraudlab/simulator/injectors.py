"""
Generators for the three download-fraud types.

Injectors return draft events (records without an event_id); the
orchestrator merges all blocks by timestamp and numbers them.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from fraudlab.records.models import NEW_HORIZON_SECONDS, Category, EventKind, Source
from fraudlab.simulator.config import BotProfile, CrowdProfile, DeviceIdMode, FarmProfile, FarmSource, TaskKind
from fraudlab.simulator.diurnal import sample_diurnal, sample_uniform
from fraudlab.simulator.rng import TokenFactory

logger = logging.getLogger(__name__)

DAY = 86400
ABNORMAL_DEVICE_PREFIX = "00000000"
SUSPICIOUS_CATEGORIES = (Category.Finance, Category.Game)


class DraftEvent(NamedTuple):
    ts: int
    kind: EventKind
    device_id: str
    vendor_verified: bool
    app_id: str
    ip_hash: str
    source: Source


@dataclass
class Injection:
    """Draft events of one traffic block and the warnings raised while generating it."""

    events: List[DraftEvent] = field(default_factory=list)
    warnings: Dict[str, int] = field(default_factory=dict)

    @property
    def n_downloads(self) -> int:
        return sum(1 for e in self.events if e.kind == EventKind.download)


@dataclass(frozen=True)
class Window:
    """The download period ``[start, end)`` in epoch seconds; ``start`` is 00:00 UTC."""

    start: int
    end: int

    @property
    def n_days(self) -> int:
        return max(1, (self.end - self.start) // DAY)


def _offsets(rng: np.random.Generator, n: int, low: int, high: int) -> np.ndarray:
    return rng.integers(low, high, size=n)


def _browse_before(
    rng: np.random.Generator,
    ts: np.ndarray,
    devices: Sequence[str],
    apps: Sequence[str],
    ips: Sequence[str],
    probabilities: Sequence[float],
    vendor_verified: bool,
) -> List[DraftEvent]:
    """
    Search and view events preceding each download, each emitted with its
    own probability.
    """
    events = []
    for kind, p, (low, high) in zip((EventKind.search, EventKind.view), probabilities, ((10, 600), (5, 300))):
        mask = rng.random(len(ts)) < p
        lead = _offsets(rng, len(ts), low, high)
        for i in np.flatnonzero(mask):
            events.append(
                DraftEvent(
                    max(0, int(ts[i] - lead[i])), kind, devices[i], vendor_verified, apps[i], ips[i], Source.client
                )
            )
    return events


def inject_type1(
    profile: FarmProfile,
    rng: np.random.Generator,
    app_id: str,
    window_start: int,
    tokens: TokenFactory,
) -> Injection:
    """
    Fake downloads from one purchased injection service.

    Every record gets its own IP address; timestamps are uniform over
    ``duration_hours`` starting ``start_hour`` hours after ``window_start``.
    The device ID follows ``device_id_mode`` and is never vendor verified.

    Args:
        profile: the farm's signature
        rng: the farm's random stream
        app_id: the promoted app
        window_start: start of the download period
        tokens: token factory of the run
    """
    n = profile.n_downloads
    if n == 0:
        return Injection()
    start = window_start + int(round(profile.start_hour * 3600))
    span = max(1, int(round(profile.duration_hours * 3600)))
    ts = sample_uniform(rng, start, start + span, n)
    ips = tokens.distinct(f"farm-ip:{profile.name}", n)

    if profile.device_id_mode == DeviceIdMode.none:
        devices = [""] * n
    elif profile.device_id_mode == DeviceIdMode.normal:
        devices = tokens.tokens(f"farm-device:{profile.name}", n)
    else:
        devices = [ABNORMAL_DEVICE_PREFIX + t[:8] for t in tokens.tokens(f"farm-device:{profile.name}", n)]

    if profile.source_mode == FarmSource.update:
        kind, source = EventKind.update, Source.update
    elif profile.source_mode == FarmSource.portal:
        kind, source = EventKind.download, Source.portal
    else:
        kind, source = EventKind.download, Source.null

    events = [DraftEvent(int(t), kind, d, False, app_id, ip, source) for t, d, ip in zip(ts, devices, ips)]
    return Injection(events=events)


def choose_target_apps(
    rng: np.random.Generator,
    ts: np.ndarray,
    target_apps: Sequence[str],
    release_ts: Sequence[int],
    new_fraction: float,
    weights: Optional[Sequence[float]] = None,
) -> Tuple[List[str], int]:
    """
    Pick one target app per download timestamp.

    With probability ``new_fraction`` the app is drawn from targets released
    within the week before ``ts``, otherwise from every target released by
    ``ts``; candidates are drawn in proportion to ``weights`` (uniformly
    without). When no app qualifies the youngest released target is used (the
    earliest one if none is released yet) and the fallback is counted.

    Returns:
        chosen app ids and the number of fallbacks
    """
    order = np.argsort(np.asarray(release_ts, dtype=np.int64), kind="stable")
    releases = np.asarray(release_ts, dtype=np.int64)[order]
    apps = [target_apps[i] for i in order]
    w = np.ones(len(order)) if weights is None else np.asarray(weights, dtype=np.float64)[order]
    cumulative = np.concatenate([[0.0], np.cumsum(w)])

    wants_new = rng.random(len(ts)) < new_fraction
    pick = rng.random(len(ts))
    released = np.searchsorted(releases, ts, side="right")
    young_from = np.where(wants_new, np.searchsorted(releases, ts - NEW_HORIZON_SECONDS, side="right"), 0)
    n_candidates = released - young_from

    low, high = cumulative[young_from], cumulative[released]
    weighted = np.searchsorted(cumulative, low + pick * (high - low), side="right") - 1
    weighted = np.clip(weighted, young_from, np.maximum(released - 1, young_from))
    chosen = np.where(n_candidates > 0, weighted, np.maximum(released - 1, 0))
    return [apps[i] for i in chosen], int((n_candidates <= 0).sum())


def inject_type2(
    profile: BotProfile,
    rng: np.random.Generator,
    target_apps: Sequence[str],
    release_ts: Sequence[int],
    window: Window,
    tokens: TokenFactory,
    night_attenuation: float = 0.2,
    categories: Optional[Sequence[Category]] = None,
) -> Injection:
    """
    Legitimate-looking fake downloads from download bots.

    Bots browse (search, view) before downloading from the market client,
    install most of what they download, target newly released apps (Finance
    and Game ones ``finance_game_weight`` times as often when ``categories``
    are given) and, with ``reset_device_per_download``, use a fresh device ID
    for every download. Their devices are never vendor verified. Steady
    traffic is uniform over the download period; otherwise it follows the
    diurnal curve.
    """
    n = profile.n_downloads
    if n == 0:
        return Injection()
    if not target_apps:
        raise ValueError("inject_type2 needs at least one target app")

    if profile.steady_traffic:
        ts = sample_uniform(rng, window.start, window.end, n)
    else:
        days = rng.integers(0, window.n_days, size=n)
        ts = sample_diurnal(rng, window.start + days * DAY, night_attenuation)

    weights = None
    if categories is not None:
        weights = [profile.finance_game_weight if c in SUSPICIOUS_CATEGORIES else 1.0 for c in categories]
    apps, fallbacks = choose_target_apps(rng, ts, target_apps, release_ts, profile.target_new_apps_fraction, weights)
    if fallbacks:
        logger.warning(f"{fallbacks} bot downloads found no newly released target app; used the youngest instead")

    if profile.reset_device_per_download:
        devices = tokens.distinct("bot-device", n)
    else:
        pool = tokens.distinct("bot-device", profile.n_bot_devices)
        devices = [pool[i] for i in rng.integers(0, len(pool), size=n)]
    proxies = tokens.tokens("bot-ip", profile.n_proxy_ips)
    ips = [proxies[i] for i in rng.integers(0, len(proxies), size=n)]

    events = [
        DraftEvent(int(t), EventKind.download, d, False, a, ip, Source.client)
        for t, d, a, ip in zip(ts, devices, apps, ips)
    ]
    events.extend(_browse_before(rng, ts, devices, apps, ips, profile.pre_download_behavior, vendor_verified=False))
    installs = rng.random(n) < profile.install_probability
    delays = _offsets(rng, n, 30, 900)
    for i in np.flatnonzero(installs):
        at = int(ts[i] + delays[i])
        if at < window.end:
            events.append(DraftEvent(at, EventKind.install, devices[i], False, apps[i], ips[i], Source.client))
    injection = Injection(events=events)
    if fallbacks:
        injection.warnings["type2_target_fallback"] = fallbacks
    return injection


# market trace of one crowd task after its install, as (kind, min delay, max delay);
# in-app work is invisible to the market except for the updates of apps kept in use
TASK_EVENTS: Dict[TaskKind, Optional[tuple]] = {
    TaskKind.registration: None,
    TaskKind.daily_signin: (EventKind.update, DAY, 2 * DAY),
    TaskKind.repost: None,
    TaskKind.add_account: None,
    TaskKind.play_game: (EventKind.update, DAY, 3 * DAY),
}


def inject_type3(
    profile: CrowdProfile,
    rng: np.random.Generator,
    worker_devices: Sequence[str],
    worker_ips: Sequence[str],
    apps: Sequence[str],
    app_weights: np.ndarray,
    window: Window,
    night_attenuation: float = 0.2,
    mobile_ips: Sequence[str] = (),
    home_ip_probability: float = 1.0,
    browse_probabilities: Sequence[float] = (0.0, 0.0),
) -> Injection:
    """
    Crowd-work downloads from real, vendor-verified worker devices.

    Each task is a regular client download: the worker browses the market
    like any user, downloads at a diurnal timestamp from home or a mobile
    network, installs the app and then works inside it.

    Args:
        profile: crowd block
        rng: the block's random stream
        worker_devices: one stable device per worker
        worker_ips: the matching home IPs
        apps: candidate apps
        app_weights: popularity of ``apps`` among regular users
        window: the download period
        night_attenuation: trough of the diurnal curve
        mobile_ips: shared mobile-network addresses used away from home
        home_ip_probability: share of tasks done on the home IP
        browse_probabilities: search and view probabilities before a download
    """
    n = len(worker_devices) * profile.tasks_per_worker
    if n == 0:
        return Injection()
    worker = np.repeat(np.arange(len(worker_devices)), profile.tasks_per_worker)
    days = rng.integers(0, window.n_days, size=n)
    ts = sample_diurnal(rng, window.start + days * DAY, night_attenuation)
    app_idx = rng.choice(len(apps), size=n, p=app_weights)
    installs = _offsets(rng, n, 30, 900)
    use_home = rng.random(n) < home_ip_probability
    mobile = rng.integers(0, max(1, len(mobile_ips)), size=n)

    task_kinds = list(profile.task_mix)
    task_p = np.array([profile.task_mix[t] for t in task_kinds])
    tasks = rng.choice(len(task_kinds), size=n, p=task_p / task_p.sum())
    delay_u = rng.random(n)

    devices = [worker_devices[w] for w in worker]
    task_apps = [apps[a] for a in app_idx]
    ips = [
        worker_ips[w] if home or not mobile_ips else mobile_ips[m] for w, home, m in zip(worker, use_home, mobile)
    ]

    events = []
    for i in range(n):
        device, ip, app, t = devices[i], ips[i], task_apps[i], int(ts[i])
        events.append(DraftEvent(t, EventKind.download, device, True, app, ip, Source.client))
        # every task installs; an install due after the window closes lands on its last second
        installed = min(t + int(installs[i]), window.end - 1)
        events.append(DraftEvent(installed, EventKind.install, device, True, app, ip, Source.client))
        trace = TASK_EVENTS[task_kinds[tasks[i]]]
        if trace is None:
            continue
        kind, low, high = trace
        at = t + low + int(delay_u[i] * (high - low))
        if at >= window.end:
            continue
        source = Source.update if kind == EventKind.update else Source.client
        events.append(DraftEvent(at, kind, device, True, app, ip, source))
    events.extend(_browse_before(rng, ts, devices, task_apps, ips, browse_probabilities, vendor_verified=True))
    return Injection(events=events)
