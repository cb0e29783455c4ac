"""Deterministic market-log simulator with injected download fraud."""
from fraudlab.simulator.catalog import SimCatalog, build_catalog
from fraudlab.simulator.config import (
    FARM_PRESETS,
    BotProfile,
    CrowdProfile,
    DeviceIdMode,
    FarmBlock,
    FarmProfile,
    FarmSource,
    RatingParams,
    SimConfig,
    TaskKind,
)
from fraudlab.simulator.diurnal import diurnal_intensity, hour_weights
from fraudlab.simulator.injectors import DraftEvent, Injection, Window, inject_type1, inject_type2, inject_type3
from fraudlab.simulator.rng import TokenFactory, stream
from fraudlab.simulator.simulate import SimulationResult, config_hash, simulate, write_simulation

__all__ = [
    "FARM_PRESETS",
    "BotProfile",
    "CrowdProfile",
    "DeviceIdMode",
    "DraftEvent",
    "FarmBlock",
    "FarmProfile",
    "FarmSource",
    "Injection",
    "RatingParams",
    "SimCatalog",
    "SimConfig",
    "SimulationResult",
    "TaskKind",
    "TokenFactory",
    "Window",
    "build_catalog",
    "config_hash",
    "diurnal_intensity",
    "hour_weights",
    "inject_type1",
    "inject_type2",
    "inject_type3",
    "simulate",
    "stream",
    "write_simulation",
]
