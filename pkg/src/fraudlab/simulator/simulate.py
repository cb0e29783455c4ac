"""
Simulator orchestration: one config in, an event log with its catalog and
ground truth out.
"""
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Union

import numpy as np
from pydantic import ValidationError

from fraudlab.core import ConfigError, LabError
from fraudlab.records import LOG_FORMAT_VERSION
from fraudlab.records.models import AppCatalogEntry, EventKind, EventRecord, FraudType, GroundTruthEntry
from fraudlab.simulator.catalog import build_catalog
from fraudlab.simulator.config import SimConfig
from fraudlab.simulator.injectors import Window, inject_type1, inject_type2, inject_type3
from fraudlab.simulator.legit import app_popularity, build_devices, established_apps, generate_legit, mobile_ip_pool
from fraudlab.simulator.rng import TokenFactory, stream
from fraudlab.stores import CSVStore
from fraudlab.utils import dump_json, sha256_hex

logger = logging.getLogger(__name__)

EVENTS_FILE = "events.csv"
CATALOG_FILE = "catalog.csv"
GROUND_TRUTH_FILE = "ground_truth.csv"
RUN_REPORT_FILE = "run_report.json"


@dataclass
class SimulationResult:
    """Everything one simulator run produces."""

    events: List[EventRecord]
    catalog: Dict[str, AppCatalogEntry]
    ground_truth: List[GroundTruthEntry]
    report: Dict = field(default_factory=dict)


def config_hash(config: SimConfig) -> str:
    return sha256_hex(config.model_dump(mode="json"))


def simulate(config: Union[SimConfig, Dict]) -> SimulationResult:
    """
    Generate a synthetic market log.

    Every traffic block draws from its own random stream; the blocks are
    merged by timestamp (ties by block, then by position inside the block)
    and numbered from 0.

    Raises:
        ConfigError: invalid or infeasible configuration
    """
    if not isinstance(config, SimConfig):
        try:
            config = SimConfig(**config)
        except ValidationError as exc:
            raise ConfigError(f"invalid simulation config: {exc}") from None

    seed = config.seed
    tokens = TokenFactory(seed)
    window = Window(config.download_start, config.end_ts)
    catalog = build_catalog(config, stream(seed, "catalog"))
    devices = build_devices(config, stream(seed, "devices"), tokens, window.n_days)
    apps, weights = app_popularity(config, stream(seed, "popularity"), catalog)

    legit = generate_legit(config, stream(seed, "legit"), catalog, devices, apps, weights, window, tokens)
    blocks: List[tuple] = [(FraudType.legit, legit)]

    expected = {FraudType.legit: config.legit_downloads}
    if config.type1.enabled:
        for farm, app_id in zip(config.type1.profiles, catalog.farm_apps):
            injection = inject_type1(farm, stream(seed, f"type1:{farm.name}"), app_id, window.start, tokens)
            blocks.append((FraudType.type1, injection))
        expected[FraudType.type1] = sum(f.n_downloads for f in config.type1.profiles)

    if config.type2.enabled:
        releases = [catalog.entries[a].release_ts for a in catalog.target_apps]
        injection = inject_type2(
            config.type2,
            stream(seed, "type2"),
            catalog.target_apps,
            releases,
            window,
            tokens,
            night_attenuation=config.night_attenuation,
            categories=[catalog.entries[a].category for a in catalog.target_apps],
        )
        blocks.append((FraudType.type2, injection))
        expected[FraudType.type2] = config.type2.n_downloads

    if config.type3.enabled:
        rng = stream(seed, "type3")
        old_devices = np.flatnonzero(~devices.is_new)
        if config.type3.n_workers > len(old_devices):
            raise ConfigError(
                f"type3.n_workers={config.type3.n_workers} exceeds the {len(old_devices)} established devices"
            )
        p = devices.activity[old_devices] / devices.activity[old_devices].sum()
        workers = rng.choice(old_devices, size=config.type3.n_workers, replace=False, p=p)
        task_apps, task_weights = established_apps(catalog, apps, weights, config.start_ts)
        injection = inject_type3(
            config.type3,
            rng,
            [devices.device_ids[w] for w in workers],
            [devices.home_ips[w] for w in workers],
            [apps[i] for i in task_apps],
            task_weights,
            window,
            night_attenuation=config.night_attenuation,
            mobile_ips=mobile_ip_pool(tokens, config.n_devices),
            home_ip_probability=config.home_ip_probability,
            browse_probabilities=(config.search_probability, config.view_probability),
        )
        blocks.append((FraudType.type3, injection))
        expected[FraudType.type3] = config.type3.n_workers * config.type3.tasks_per_worker

    events, ground_truth = _merge(blocks)
    report = _report(config, catalog, events, ground_truth, blocks, expected)
    logger.info(f"Simulated {len(events)} records ({report['downloads']['total']} downloads) with seed {seed}")
    return SimulationResult(events=events, catalog=catalog.entries, ground_truth=ground_truth, report=report)


def _merge(blocks: List[tuple]):
    keyed = [
        (draft.ts, ordinal, index, fraud_type, draft)
        for ordinal, (fraud_type, injection) in enumerate(blocks)
        for index, draft in enumerate(injection.events)
    ]
    keyed.sort(key=lambda k: k[:3])
    events = [EventRecord(event_id=i, **k[4]._asdict()) for i, k in enumerate(keyed)]
    ground_truth = [GroundTruthEntry(event_id=i, fraud_type=k[3]) for i, k in enumerate(keyed)]
    return events, ground_truth


def _report(config, catalog, events, ground_truth, blocks, expected) -> Dict:
    records: Dict[str, int] = {t.name: 0 for t in FraudType}
    downloads: Dict[str, int] = {t.name: 0 for t in FraudType}
    for event, truth in zip(events, ground_truth):
        records[truth.fraud_type.name] += 1
        # type-1 update farms inject through updates; those count as their volume
        farm_update = truth.fraud_type == FraudType.type1 and event.kind == EventKind.update
        if event.kind == EventKind.download or farm_update:
            downloads[truth.fraud_type.name] += 1
    for fraud_type, volume in expected.items():
        if downloads[fraud_type.name] != volume:
            raise LabError(f"{fraud_type.name} volume {downloads[fraud_type.name]} != configured {volume}")
    downloads["total"] = sum(downloads[t.name] for t in FraudType)

    warnings: Dict[str, int] = {}
    for _, injection in blocks:
        for name, count in injection.warnings.items():
            warnings[name] = warnings.get(name, 0) + count

    return {
        "format_version": LOG_FORMAT_VERSION,
        "seed": config.seed,
        "config_hash": config_hash(config),
        "window": {"start_ts": config.start_ts, "download_start_ts": config.download_start, "end_ts": config.end_ts},
        "records": records,
        "downloads": downloads,
        "apps": {
            "regular": len(catalog.regular_apps),
            "type2_targets": len(catalog.target_apps),
            "type1_farm_apps": len(catalog.farm_apps),
        },
        "warnings": warnings,
    }


def write_simulation(result: SimulationResult, out_dir: Union[str, Path]) -> Dict[str, Path]:
    """
    Write the three record files and the run report into ``out_dir``.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {
        "events": out_dir / EVENTS_FILE,
        "catalog": out_dir / CATALOG_FILE,
        "ground_truth": out_dir / GROUND_TRUTH_FILE,
    }
    for codec, docs in (
        ("events", result.events),
        ("catalog", list(result.catalog.values())),
        ("ground_truth", result.ground_truth),
    ):
        with CSVStore(paths[codec], codec=codec, read_only=False) as store:
            store.update(docs)
    paths["report"] = out_dir / RUN_REPORT_FILE
    dump_json(result.report, paths["report"])
    return paths
