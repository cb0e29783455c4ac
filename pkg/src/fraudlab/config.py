"""
The lab configuration: one YAML file with a section per pipeline stage.
"""
from pathlib import Path
from typing import Any, Dict, Union

from pydantic import BaseModel, ConfigDict, ValidationError
from ruamel.yaml import YAML
from ruamel.yaml.error import YAMLError

from fraudlab.core import ConfigError, InputMissingError
from fraudlab.evaluation.rule_filter import FilterConfig
from fraudlab.evaluation.split import SplitConfig
from fraudlab.labeling.models import LabelingConfig
from fraudlab.simulator.config import SimConfig
from fraudlab.trees.params import ImportanceParams, TrainParams
from fraudlab.utils import sha256_hex


class LabConfig(BaseModel):
    """
    Every stage reads its own section; omitted sections take their defaults.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    simulation: SimConfig = SimConfig()
    labeling: LabelingConfig = LabelingConfig()
    split: SplitConfig = SplitConfig()
    train: TrainParams = TrainParams()
    importance: ImportanceParams = ImportanceParams()
    filter: FilterConfig = FilterConfig()

    @property
    def config_hash(self) -> str:
        """sha256 of the canonical JSON form of the validated config."""
        return sha256_hex(self.model_dump(mode="json"))


def parse_config(data: Union[Dict[str, Any], None]) -> LabConfig:
    """
    Raises:
        ConfigError: unknown keys, out-of-range values or an infeasible setup
    """
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError("a lab config must be a mapping of sections")
    try:
        return LabConfig(**data)
    except ValidationError as exc:
        raise ConfigError(f"invalid lab config: {exc}") from None


def load_config(path: Union[str, Path, None] = None) -> LabConfig:
    """
    Load and validate a YAML lab config; the defaults without a path.

    Raises:
        InputMissingError: the file does not exist
        ConfigError: the file is not YAML or fails validation
    """
    if path is None:
        return LabConfig()
    path = Path(path)
    if not path.exists():
        raise InputMissingError(f"Missing input file {path}")
    try:
        data = YAML(typ="safe", pure=True).load(path.read_text())
    except YAMLError as exc:
        raise ConfigError(f"{path} is not valid YAML: {exc}") from None
    return parse_config(data)
