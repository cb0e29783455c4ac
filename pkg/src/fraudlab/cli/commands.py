"""
The pipeline subcommands. Each one reads its inputs, writes its outputs into
one directory and finishes with that directory's run manifest.
"""
import asyncio
import logging
import time
from pathlib import Path
from typing import Dict, List, Optional

import click

from fraudlab import __version__
from fraudlab.cli.manifest import RunRecorder
from fraudlab.cli.multiprocessing import multi
from fraudlab.cli.serial import serial
from fraudlab.config import LabConfig, load_config
from fraudlab.core import Builder, InputMissingError
from fraudlab.evaluation import (
    ABLATION_SETS,
    EvalReport,
    LabeledLog,
    ablate,
    comparative_analysis,
    evaluate_model,
    filter_hits,
    filter_quality,
    fit,
    fraud_type_auc,
    second_run_config,
    type1_rule_filter,
)
from fraudlab.features import FEATURE_SETS, FeatureBuilder, FeatureMatrix, ProfileBuilder
from fraudlab.features.matrix import MATRIX_FORMAT_VERSION
from fraudlab.labeling import LabelBuilder, LabelSet, build_labels, class_balance, sample_days
from fraudlab.labeling.models import AppStatus
from fraudlab.records import LOG_FORMAT_VERSION, EventRecord, FraudType
from fraudlab.simulator import SimConfig, simulate, write_simulation
from fraudlab.stores import CSVStore, MemoryStore
from fraudlab.trees import gini_importance, load_model, rank_features, save_model, write_importances
from fraudlab.trees.model_file import MODEL_FORMAT_VERSION
from fraudlab.utils import dump_json

logger = logging.getLogger("flab")

LABELS_FILE = "labels.csv"
APP_STATUS_FILE = "app_status.csv"
FLAGS_FILE = "type1_flags.csv"
LABEL_REPORT_FILE = "label_report.json"
FILTER_REPORT_FILE = "filter_report.json"
MODEL_FILE = "model.json"
IMPORTANCE_FILE = "importance.csv"
FRAUD_AUC_FILE = "fraud_type_auc.json"

config_option = click.option(
    "-c",
    "--config",
    "config_path",
    type=click.Path(dir_okay=False),
    default=None,
    help="YAML lab config; built-in defaults when omitted",
)
out_option = click.option(
    "-o", "--out", "out_dir", type=click.Path(file_okay=False), required=True, help="Output directory"
)


def input_path(path: Optional[str], name: str) -> Optional[Path]:
    """
    Raises:
        InputMissingError: a given path does not exist
    """
    if path is None:
        return None
    path = Path(path)
    if not path.exists():
        raise InputMissingError(f"Missing input file {path} ({name})")
    return path


def run_builder(builder: Builder, ctx: click.Context) -> float:
    """Run a builder serially or in a process pool, per ``--threads``."""
    threads, no_bars = ctx.obj["threads"], ctx.obj["no_bars"]
    if threads == 1:
        return serial(builder, no_bars)
    return asyncio.run(multi(builder=builder, num_processes=threads, no_bars=no_bars))


def read_records(path: Path, codec: str) -> List:
    store = CSVStore(path, codec=codec)
    store.connect()
    return list(store.query())


def read_label_set(labels: Path, app_status: Optional[Path] = None) -> LabelSet:
    statuses = {r.app_id: r for r in read_records(app_status, "app_status")} if app_status else {}
    return LabelSet.from_records(read_records(labels, "labels"), statuses)


def label_log(log: List[EventRecord], config: LabConfig) -> LabelSet:
    """Label a log in memory with the config's labeling section."""
    lab = config.labeling
    days = sample_days(log, lab.sample_days, lab.seed) if lab.sample_days else None
    flagged = {f.event_id for f in type1_rule_filter(log, config.filter)} if lab.prefilter_type1 else None
    return build_labels(log, lab.threshold, lab.window, lab.fold_excluded, days, flagged)


@click.command(name="simulate")
@config_option
@out_option
@click.option("--seed", type=click.IntRange(0, 2**64 - 1), default=None, help="Override simulation.seed")
def simulate_cmd(config_path, out_dir, seed):
    """Simulate a market log with injected fraud."""
    config = load_config(input_path(config_path, "config"))
    if seed is not None:
        simulation = SimConfig(**{**config.simulation.model_dump(mode="json"), "seed": seed})
        config = config.model_copy(update={"simulation": simulation})
    with RunRecorder("simulate", out_dir, __version__) as recorder:
        if config_path:
            recorder.add_input("config", config_path)
        started = time.perf_counter()
        result = simulate(config.simulation)
        recorder.time("simulate", time.perf_counter() - started)
        paths = write_simulation(result, out_dir)
        recorder.add_outputs(*paths.values())
        recorder.manifest.config_hash = config.config_hash
        recorder.manifest.seeds = {"simulation": config.simulation.seed}
        recorder.manifest.format_versions = {"event_log": LOG_FORMAT_VERSION}
        recorder.finish()


@click.command()
@click.option("--log", "log_path", required=True, help="Event log CSV")
@click.option("--flags", "flags_path", default=None, help="Type-1 flags to drop before labeling")
@config_option
@out_option
@click.pass_context
def label(ctx, log_path, flags_path, config_path, out_dir):
    """Label downloads by the non-vendor share of their app."""
    config = load_config(input_path(config_path, "config"))
    lab = config.labeling
    out = Path(out_dir)
    with RunRecorder("label", out, __version__) as recorder:
        recorder.add_input("log", input_path(log_path, "log"))
        events = CSVStore(log_path, codec="events")
        events.connect()
        flags = None
        if flags_path is not None:
            recorder.add_input("flags", input_path(flags_path, "flags"))
            flags = CSVStore(flags_path, codec="type1_flags")
        elif lab.prefilter_type1:
            with CSVStore(out / FLAGS_FILE, codec="type1_flags", read_only=False) as store:
                store.update(type1_rule_filter(list(events.query()), config.filter))
            recorder.add_outputs(out / FLAGS_FILE)
            flags = CSVStore(out / FLAGS_FILE, codec="type1_flags")
        days = sample_days(list(events.query()), lab.sample_days, lab.seed) if lab.sample_days else None

        builder = LabelBuilder(
            events=events,
            labels=CSVStore(out / LABELS_FILE, codec="labels", read_only=False),
            app_status=CSVStore(out / APP_STATUS_FILE, codec="app_status", read_only=False),
            threshold=lab.threshold,
            window=lab.window,
            fold_excluded=lab.fold_excluded,
            days=days,
            flags=flags,
        )
        recorder.time("label", run_builder(builder, ctx))

        label_set = read_label_set(out / LABELS_FILE, out / APP_STATUS_FILE)
        balance = class_balance(label_set)
        statuses = [r.status for r in label_set.app_status.values()]
        dump_json(
            {
                "threshold": lab.threshold,
                "window": list(lab.window) if lab.window else None,
                "days": days,
                "n_pos": balance.n_pos,
                "n_neg": balance.n_neg,
                "n_excluded": len(label_set.excluded_event_ids),
                "positive_ratio": balance.ratio if balance.defined else "undefined",
                "apps": {s.value: statuses.count(s) for s in AppStatus},
            },
            out / LABEL_REPORT_FILE,
        )
        recorder.add_outputs(out / LABELS_FILE, out / APP_STATUS_FILE, out / LABEL_REPORT_FILE)
        recorder.manifest.config_hash = config.config_hash
        recorder.manifest.seeds = {"labeling": lab.seed}
        recorder.finish()


@click.command()
@click.option("--log", "log_path", required=True, help="Event log CSV")
@click.option("--catalog", "catalog_path", required=True, help="App catalog CSV")
@click.option("--labels", "labels_path", required=True, help="Label CSV")
@click.option("--set", "feature_set", type=click.Choice([*FEATURE_SETS, "ip"]), default="all", show_default=True)
@config_option
@out_option
@click.pass_context
def featurize(ctx, log_path, catalog_path, labels_path, feature_set, config_path, out_dir):
    """Export the feature matrix of the labeled downloads."""
    config = load_config(input_path(config_path, "config"))
    with RunRecorder("featurize", out_dir, __version__) as recorder:
        events = CSVStore(input_path(log_path, "log"), codec="events")
        catalog = CSVStore(input_path(catalog_path, "catalog"), codec="catalog")
        labels = CSVStore(input_path(labels_path, "labels"), codec="labels")
        for name, path in (("log", log_path), ("catalog", catalog_path), ("labels", labels_path)):
            recorder.add_input(name, path)
        profiles = MemoryStore("profiles", key="entity_id")
        rows = MemoryStore("feature_rows", key="event_id")

        recorder.time("profiles", run_builder(ProfileBuilder(events, profiles, window=config.labeling.window), ctx))
        builder = FeatureBuilder(events, catalog, labels, profiles, rows)
        recorder.time("featurize", run_builder(builder, ctx))

        matrix = builder.to_matrix(feature_set)
        recorder.add_outputs(*matrix.write(out_dir).values())
        recorder.manifest.config_hash = config.config_hash
        recorder.manifest.format_versions = {"feature_matrix": MATRIX_FORMAT_VERSION}
        recorder.finish()


@click.command()
@click.option("--matrix", "matrix_path", required=True, help="Feature matrix directory or CSV")
@config_option
@out_option
def train(matrix_path, config_path, out_dir):
    """Train a boosted-tree model on a feature matrix."""
    config = load_config(input_path(config_path, "config"))
    with RunRecorder("train", out_dir, __version__) as recorder:
        recorder.add_input("matrix", input_path(matrix_path, "matrix"))
        matrix = FeatureMatrix.read(matrix_path)
        started = time.perf_counter()
        model = fit(matrix, config.train)
        recorder.time("train", time.perf_counter() - started)
        save_model(model, Path(out_dir) / MODEL_FILE)
        recorder.add_outputs(Path(out_dir) / MODEL_FILE)
        recorder.manifest.config_hash = config.config_hash
        recorder.manifest.seeds = {"train": config.train.seed}
        recorder.manifest.format_versions = {"model": MODEL_FORMAT_VERSION}
        recorder.finish()


@click.command()
@click.option("--model", "model_path", required=True, help="Model file")
@click.option("--matrix", "matrix_path", required=True, help="Feature matrix directory or CSV")
@click.option("--threshold", type=click.FloatRange(0, 1), default=0.5, show_default=True)
@out_option
def evaluate(model_path, matrix_path, threshold, out_dir):
    """Score a saved matrix with a saved model."""
    with RunRecorder("evaluate", out_dir, __version__) as recorder:
        recorder.add_input("model", input_path(model_path, "model"))
        recorder.add_input("matrix", input_path(matrix_path, "matrix"))
        model = load_model(model_path)
        matrix = FeatureMatrix.read(matrix_path)
        result = evaluate_model(model, matrix, threshold)
        report = EvalReport(
            rows=[result],
            threshold=threshold,
            split={"validation": "given"},
            seed=model.params.seed if model.params is not None else 0,
            class_balance={"test": {"n_pos": matrix.n_pos, "n_neg": matrix.n_neg}},
            params=model.params.model_dump() if model.params is not None else {},
        )
        recorder.add_outputs(*report.write(out_dir).values())
        recorder.finish()


@click.command(name="ablate")
@click.option("--log", "log_path", required=True, help="Event log CSV")
@click.option("--catalog", "catalog_path", required=True, help="App catalog CSV")
@click.option("--labels", "labels_path", default=None, help="Label CSV; labeled with the config when omitted")
@click.option("--threshold", type=click.FloatRange(0, 1), default=0.5, show_default=True)
@config_option
@out_option
@click.pass_context
def ablate_cmd(ctx, log_path, catalog_path, labels_path, threshold, config_path, out_dir):
    """Train and test one model per feature set."""
    config = load_config(input_path(config_path, "config"))
    with RunRecorder("ablate", out_dir, __version__) as recorder:
        recorder.add_input("log", input_path(log_path, "log"))
        recorder.add_input("catalog", input_path(catalog_path, "catalog"))
        log = read_records(Path(log_path), "events")
        catalog = {entry.app_id: entry for entry in read_records(Path(catalog_path), "catalog")}
        if labels_path is not None:
            recorder.add_input("labels", input_path(labels_path, "labels"))
            labels = read_label_set(Path(labels_path))
        else:
            labels = label_log(log, config)
        seeds: Dict[str, int] = {"split": config.split.seed, "train": config.train.seed}

        second = None
        if config.split.validation == "second_run":
            second_sim = second_run_config(config.simulation, config.split)
            result = simulate(second_sim)
            second = LabeledLog(result.events, result.catalog, label_log(result.events, config))
            seeds["second_run"] = second_sim.seed

        started = time.perf_counter()
        report = ablate(
            LabeledLog(log, catalog, labels),
            config.split,
            config.train,
            second=second,
            feature_sets=ABLATION_SETS,
            threshold=threshold,
            n_workers=ctx.obj["threads"],
        )
        recorder.time("ablate", time.perf_counter() - started)
        report.config_hash = config.config_hash
        recorder.add_outputs(*report.write(out_dir).values())
        recorder.manifest.config_hash = config.config_hash
        recorder.manifest.seeds = seeds
        recorder.manifest.format_versions = {"feature_matrix": MATRIX_FORMAT_VERSION}
        recorder.finish()


@click.command()
@click.option("--log", "log_path", required=True, help="Event log CSV")
@click.option("--catalog", "catalog_path", required=True, help="App catalog CSV")
@click.option("--labels", "labels_path", required=True, help="Label CSV")
@click.option(
    "--app-status",
    "app_status_path",
    default=None,
    help="App status CSV; defaults to app_status.csv next to the labels",
)
@click.option("--flags", "flags_path", default=None, help="Type-1 flags, counted per reason")
@out_option
def analyze(log_path, catalog_path, labels_path, app_status_path, flags_path, out_dir):
    """Compare suspicious apps and downloads with normal ones."""
    labels_file = input_path(labels_path, "labels")
    status_file = input_path(app_status_path or str(labels_file.parent / APP_STATUS_FILE), "app status")
    with RunRecorder("analyze", out_dir, __version__) as recorder:
        for name, path in (("log", log_path), ("catalog", catalog_path), ("labels", labels_file)):
            recorder.add_input(name, input_path(path, name))
        recorder.add_input("app_status", status_file)
        flags = None
        if flags_path is not None:
            recorder.add_input("flags", input_path(flags_path, "flags"))
            flags = read_records(Path(flags_path), "type1_flags")
        catalog = {entry.app_id: entry for entry in read_records(Path(catalog_path), "catalog")}
        report = comparative_analysis(
            read_records(Path(log_path), "events"),
            catalog,
            read_label_set(labels_file, status_file),
            flags=flags,
        )
        recorder.add_outputs(*report.write(out_dir).values())
        recorder.finish()


@click.command(name="filter-type1")
@click.option("--log", "log_path", required=True, help="Event log CSV")
@click.option("--ground-truth", "truth_path", default=None, help="Simulator ground truth, to score the filter")
@config_option
@out_option
def filter_type1(log_path, truth_path, config_path, out_dir):
    """Flag download-farm records by source, device ID and update bursts."""
    config = load_config(input_path(config_path, "config"))
    out = Path(out_dir)
    with RunRecorder("filter-type1", out, __version__) as recorder:
        recorder.add_input("log", input_path(log_path, "log"))
        flags = type1_rule_filter(read_records(Path(log_path), "events"), config.filter)
        with CSVStore(out / FLAGS_FILE, codec="type1_flags", read_only=False) as store:
            store.update(flags)
        report = {"filter": config.filter.model_dump(), "hits": filter_hits(flags)}
        if truth_path is not None:
            recorder.add_input("ground_truth", input_path(truth_path, "ground truth"))
            quality = filter_quality(flags, read_records(Path(truth_path), "ground_truth"))
            report["quality"] = {k: "undefined" if v is None else v for k, v in quality.items()}
        dump_json(report, out / FILTER_REPORT_FILE)
        recorder.add_outputs(out / FLAGS_FILE, out / FILTER_REPORT_FILE)
        recorder.manifest.config_hash = config.config_hash
        recorder.finish()


@click.command()
@click.option("--matrix", "matrix_path", required=True, help="Feature matrix directory or CSV")
@config_option
@out_option
def importance(matrix_path, config_path, out_dir):
    """Rank features by Gini importance."""
    config = load_config(input_path(config_path, "config"))
    with RunRecorder("importance", out_dir, __version__) as recorder:
        recorder.add_input("matrix", input_path(matrix_path, "matrix"))
        matrix = FeatureMatrix.read(matrix_path)
        started = time.perf_counter()
        importances = gini_importance(matrix.X, matrix.y, config.importance, feature_names=matrix.feature_names)
        recorder.time("importance", time.perf_counter() - started)
        path = Path(out_dir) / IMPORTANCE_FILE
        write_importances(rank_features(importances, matrix.feature_names), path)
        recorder.add_outputs(path)
        recorder.manifest.config_hash = config.config_hash
        recorder.manifest.seeds = {"importance": config.importance.seed}
        recorder.finish()


@click.command(name="fraud-type-auc")
@click.option("--log", "log_path", required=True, help="Event log CSV")
@click.option("--catalog", "catalog_path", required=True, help="App catalog CSV")
@click.option("--ground-truth", "truth_path", required=True, help="Simulator ground truth")
@click.option("--fraud-type", type=click.Choice(["type1", "type2", "type3"]), default="type3", show_default=True)
@config_option
@out_option
def fraud_type_auc_cmd(log_path, catalog_path, truth_path, fraud_type, config_path, out_dir):
    """Test AUC of separating one fraud type from legit downloads."""
    config = load_config(input_path(config_path, "config"))
    with RunRecorder("fraud-type-auc", out_dir, __version__) as recorder:
        for name, path in (("log", log_path), ("catalog", catalog_path), ("ground_truth", truth_path)):
            recorder.add_input(name, input_path(path, name))
        catalog = {entry.app_id: entry for entry in read_records(Path(catalog_path), "catalog")}
        score = fraud_type_auc(
            read_records(Path(log_path), "events"),
            catalog,
            read_records(Path(truth_path), "ground_truth"),
            fraud_type=FraudType[fraud_type],
            params=config.train,
            seed=config.split.seed,
        )
        path = Path(out_dir) / FRAUD_AUC_FILE
        dump_json({"fraud_type": fraud_type, "auc": score, "params": config.train.model_dump()}, path)
        recorder.add_outputs(path)
        recorder.manifest.config_hash = config.config_hash
        recorder.manifest.seeds = {"split": config.split.seed, "train": config.train.seed}
        recorder.finish()


COMMANDS = [
    simulate_cmd,
    label,
    featurize,
    train,
    evaluate,
    ablate_cmd,
    analyze,
    filter_type1,
    importance,
    fraud_type_auc_cmd,
]
