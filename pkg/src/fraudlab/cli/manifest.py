"""
Run manifests: what a command read and wrote, with which config and seeds.

``manifest.json`` holds only reproducible fields so re-runs are
byte-identical; wall-clock timings and build events go to ``timings.json``.
"""
import logging
from pathlib import Path
from typing import Dict, List, Optional, Union

from pydantic import BaseModel, ConfigDict, Field

from fraudlab.utils import ReportingHandler, dump_json, sha256_hex

MANIFEST_FILE = "manifest.json"
TIMINGS_FILE = "timings.json"


def _relative(path: Path, root: Path) -> str:
    try:
        return path.resolve().relative_to(root.resolve()).as_posix()
    except ValueError:
        return path.as_posix()


class RunManifest(BaseModel):
    """Provenance of one command's output directory."""

    model_config = ConfigDict(extra="forbid")

    command: str
    fraudlab_version: str
    config_hash: Optional[str] = None
    seeds: Dict[str, int] = Field(default_factory=dict)
    inputs: Dict[str, str] = Field(default_factory=dict)
    input_hashes: Dict[str, str] = Field(default_factory=dict)
    outputs: List[str] = Field(default_factory=list)
    format_versions: Dict[str, int] = Field(default_factory=dict)
    warnings: List[str] = Field(default_factory=list)


class RunRecorder:
    """
    Collects a command's manifest and stage timings while it runs.

    Attaches a ``ReportingHandler`` to the root logger for the duration of
    the command and writes both files into the output directory on
    ``finish``.
    """

    def __init__(self, command: str, out_dir: Union[str, Path], version: str):
        self.out_dir = Path(out_dir)
        self.manifest = RunManifest(command=command, fraudlab_version=version)
        self.timings: Dict[str, float] = {}
        self.reporter = ReportingHandler()

    def __enter__(self) -> "RunRecorder":
        self.out_dir.mkdir(parents=True, exist_ok=True)
        logging.getLogger().addHandler(self.reporter)
        return self

    def __exit__(self, *exc):
        logging.getLogger().removeHandler(self.reporter)

    def add_input(self, name: str, path: Union[str, Path]):
        path = Path(path)
        self.manifest.inputs[name] = path.as_posix()
        if path.is_file():
            self.manifest.input_hashes[name] = sha256_hex(path.read_bytes())

    def add_outputs(self, *paths: Union[str, Path]):
        for path in paths:
            self.manifest.outputs.append(_relative(Path(path), self.out_dir))

    def time(self, stage: str, seconds: float):
        self.timings[stage] = self.timings.get(stage, 0.0) + seconds

    def finish(self) -> Dict[str, Path]:
        self.manifest.warnings = list(self.reporter.warnings)
        self.manifest.outputs = sorted(set(self.manifest.outputs))
        paths = {"manifest": self.out_dir / MANIFEST_FILE, "timings": self.out_dir / TIMINGS_FILE}
        dump_json(self.manifest.model_dump(), paths["manifest"])
        dump_json(
            {
                "stages": self.timings,
                "events": self.reporter.events,
                "errors": self.reporter.errors,
            },
            paths["timings"],
        )
        return paths
