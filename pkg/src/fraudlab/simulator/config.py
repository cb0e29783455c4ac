"""
Simulator configuration models.
"""
from enum import Enum
from typing import Dict, List, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from fraudlab.records.models import Category

PROBABILITY_TOLERANCE = 1e-9

DEFAULT_CATEGORY_MIX: Dict[Category, float] = {
    Category.Finance: 0.07,
    Category.Game: 0.08,
    Category.Tools: 0.20,
    Category.Social: 0.12,
    Category.Shopping: 0.13,
    Category.Education: 0.12,
    Category.Life: 0.15,
    Category.Other: 0.13,
}


class FarmSource(str, Enum):
    """How a download farm delivers its fake downloads."""

    portal = "portal"
    update = "update"
    null = "null"


class DeviceIdMode(str, Enum):
    """Device ID a download farm attaches to its records."""

    none = "none"
    normal = "normal"
    abnormal = "abnormal"


class TaskKind(str, Enum):
    """Crowd-work task types."""

    registration = "registration"
    daily_signin = "daily_signin"
    repost = "repost"
    add_account = "add_account"
    play_game = "play_game"


def _check_distribution(mix: Dict, name: str) -> Dict:
    if any(p < 0 for p in mix.values()):
        raise ValueError(f"{name} has a negative probability")
    total = sum(mix.values())
    if abs(total - 1.0) > PROBABILITY_TOLERANCE:
        raise ValueError(f"{name} sums to {total!r}, expected 1")
    return mix


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class FarmProfile(_Section):
    """
    One purchased download-injection service (type-1 fraud).
    """

    name: str = "farm"
    n_downloads: int = Field(0, ge=0)
    source_mode: FarmSource = FarmSource.portal
    device_id_mode: DeviceIdMode = DeviceIdMode.none
    duration_hours: float = Field(1.0, gt=0, le=24)
    start_hour: float = Field(0.0, ge=0, description="Offset of the injection from the start of the download period")
    distinct_ips: bool = True

    @field_validator("distinct_ips")
    @classmethod
    def always_distinct(cls, value: bool) -> bool:
        if not value:
            raise ValueError("download farms always use distinct IP addresses")
        return value


FARM_PRESETS: Dict[str, FarmProfile] = {
    "farm1": FarmProfile(
        name="farm1",
        n_downloads=10000,
        source_mode=FarmSource.portal,
        device_id_mode=DeviceIdMode.none,
        duration_hours=12,
        start_hour=24,
    ),
    "farm2": FarmProfile(
        name="farm2",
        n_downloads=15000,
        source_mode=FarmSource.update,
        device_id_mode=DeviceIdMode.normal,
        duration_hours=2,
        start_hour=72,
    ),
    "farm3": FarmProfile(
        name="farm3",
        n_downloads=10000,
        source_mode=FarmSource.null,
        device_id_mode=DeviceIdMode.abnormal,
        duration_hours=0.2,
        start_hour=120,
    ),
    "farm4": FarmProfile(
        name="farm4",
        n_downloads=20000,
        source_mode=FarmSource.portal,
        device_id_mode=DeviceIdMode.abnormal,
        duration_hours=1,
        start_hour=168,
    ),
}


class FarmBlock(_Section):
    """Type-1 block: a list of farm profiles or preset names."""

    enabled: bool = False
    farms: List[Union[str, FarmProfile]] = Field(default_factory=lambda: list(FARM_PRESETS.values()))

    @field_validator("farms")
    @classmethod
    def resolve_presets(cls, farms: List[Union[str, FarmProfile]]) -> List[FarmProfile]:
        resolved = []
        for farm in farms:
            if isinstance(farm, str):
                if farm not in FARM_PRESETS:
                    raise ValueError(f"unknown farm preset {farm!r}; known: {', '.join(FARM_PRESETS)}")
                farm = FARM_PRESETS[farm]
            resolved.append(farm)
        names = [f.name for f in resolved]
        if len(set(names)) != len(names):
            raise ValueError("farm names must be unique")
        return resolved

    @property
    def profiles(self) -> List[FarmProfile]:
        return [f for f in self.farms if isinstance(f, FarmProfile)]


class BotProfile(_Section):
    """
    Type-2 block: download bots that mimic regular users.
    """

    enabled: bool = True
    n_downloads: int = Field(10000, ge=0)
    n_target_apps: int = Field(40, ge=1)
    reset_device_per_download: bool = True
    n_bot_devices: int = Field(500, ge=1, description="Device pool when devices are not reset")
    pre_download_behavior: Tuple[float, float] = (0.8, 0.9)
    target_new_apps_fraction: float = Field(0.7, ge=0, le=1)
    steady_traffic: bool = True
    co_rating_boost: bool = True
    n_proxy_ips: int = Field(2000, ge=1)
    install_probability: float = Field(0.9, ge=0, le=1, description="Install after a download, as regular users do")
    finance_game_weight: float = Field(
        4.0, gt=0, description="Pick weight of Finance and Game targets relative to other targets"
    )

    @field_validator("pre_download_behavior")
    @classmethod
    def check_probabilities(cls, value: Tuple[float, float]) -> Tuple[float, float]:
        if not all(0.0 <= p <= 1.0 for p in value):
            raise ValueError("search/view probabilities must lie in [0, 1]")
        return value


class CrowdProfile(_Section):
    """
    Type-3 block: paid crowd workers on real devices.
    """

    enabled: bool = True
    n_workers: int = Field(2000, ge=0)
    tasks_per_worker: int = Field(1, ge=0)
    task_mix: Dict[TaskKind, float] = Field(default_factory=lambda: {t: 1 / len(TaskKind) for t in TaskKind})

    @field_validator("task_mix")
    @classmethod
    def check_mix(cls, mix: Dict[TaskKind, float]) -> Dict[TaskKind, float]:
        return _check_distribution(mix, "task_mix")


class RatingParams(_Section):
    """Normal rating distribution, clipped to [1, 5] and rounded to one decimal."""

    mean: float = Field(..., ge=1, le=5)
    std: float = Field(..., ge=0)


class SimConfig(_Section):
    """
    Full simulator configuration. The simulated span is ``horizon_days``
    whole UTC days from ``start_ts``; legit downloads begin after the first
    ``history_days``.
    """

    seed: int = Field(20180701, ge=0, lt=2**64)
    start_ts: int = Field(1530403200, ge=0, description="2018-07-01T00:00:00Z")
    horizon_days: int = Field(35, ge=1)
    history_days: int = Field(8, ge=0)
    n_apps: int = Field(500, ge=1)
    app_id_prefix: str = Field("app_", pattern=r"^[^,\s]*$")
    n_devices: int = Field(100000, ge=1)
    legit_downloads: int = Field(88000, ge=0)
    new_device_fraction: float = Field(0.02, ge=0, le=1)
    new_app_fraction: float = Field(0.1, ge=0, le=1, description="Regular apps released during the download period")
    activity_sigma: float = Field(1.0, ge=0)
    search_probability: float = Field(0.5, ge=0, le=1)
    view_probability: float = Field(0.7, ge=0, le=1)
    install_probability: float = Field(0.9, ge=0, le=1)
    update_probability: float = Field(0.2, ge=0, le=1)
    home_ip_probability: float = Field(0.7, ge=0, le=1)
    zipf_exponent: float = Field(1.0, ge=0)
    target_app_legit_share: float = Field(0.0005, ge=0, lt=1)
    category_mix: Dict[Category, float] = Field(default_factory=lambda: dict(DEFAULT_CATEGORY_MIX))
    suspicious_category_boost: float = Field(0.55, ge=0, le=1)
    normal_rating: RatingParams = RatingParams(mean=3.2, std=0.8)
    fraud_rating: RatingParams = RatingParams(mean=4.5, std=0.4)
    night_attenuation: float = Field(0.2, ge=0, le=1)
    type1: FarmBlock = FarmBlock()
    type2: BotProfile = BotProfile()
    type3: CrowdProfile = CrowdProfile()

    @field_validator("category_mix")
    @classmethod
    def check_category_mix(cls, mix: Dict[Category, float]) -> Dict[Category, float]:
        return _check_distribution(mix, "category_mix")

    @model_validator(mode="after")
    def check_feasible(self) -> "SimConfig":
        if self.history_days >= self.horizon_days:
            raise ValueError("history_days must leave at least one download day inside horizon_days")
        if self.type3.enabled and self.type3.n_workers > self.n_devices:
            raise ValueError(
                f"type3.n_workers={self.type3.n_workers} demands more distinct devices than n_devices={self.n_devices}"
            )
        if self.n_special_apps >= self.n_apps:
            raise ValueError(
                f"n_apps={self.n_apps} leaves no regular app after {self.n_special_apps} fraud-targeted apps"
            )
        return self

    @property
    def n_target_apps(self) -> int:
        return self.type2.n_target_apps if self.type2.enabled else 0

    @property
    def n_farm_apps(self) -> int:
        return len(self.type1.profiles) if self.type1.enabled else 0

    @property
    def n_special_apps(self) -> int:
        return self.n_target_apps + self.n_farm_apps

    @property
    def download_start(self) -> int:
        return self.start_ts + self.history_days * 86400

    @property
    def end_ts(self) -> int:
        return self.start_ts + self.horizon_days * 86400
