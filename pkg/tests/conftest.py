from pathlib import Path

import pytest
from ruamel.yaml import YAML

from fraudlab.simulator import SimConfig, simulate

# a run small enough for unit tests that still holds every traffic block
SMALL_CONFIG = {
    "seed": 7,
    "horizon_days": 14,
    "history_days": 7,
    "n_apps": 60,
    "n_devices": 500,
    "legit_downloads": 2000,
    "type1": {
        "enabled": True,
        "farms": [
            {
                "name": "portal_farm",
                "n_downloads": 150,
                "source_mode": "portal",
                "device_id_mode": "none",
                "duration_hours": 1,
                "start_hour": 24,
            },
            {
                "name": "update_farm",
                "n_downloads": 150,
                "source_mode": "update",
                "device_id_mode": "normal",
                "duration_hours": 1,
                "start_hour": 48,
            },
            {
                "name": "null_farm",
                "n_downloads": 150,
                "source_mode": "null",
                "device_id_mode": "abnormal",
                "duration_hours": 0.5,
                "start_hour": 72,
            },
        ],
    },
    "type2": {"n_downloads": 300, "n_target_apps": 5, "n_proxy_ips": 50},
    "type3": {"n_workers": 50, "tasks_per_worker": 2},
}


@pytest.fixture()
def test_dir():
    module_dir = Path(__file__).resolve().parent
    test_dir = module_dir / "test_files"
    return test_dir.resolve()


@pytest.fixture()
def small_config():
    return SimConfig(**SMALL_CONFIG)


@pytest.fixture(scope="session")
def small_run():
    """One simulated log shared by every test that only reads it."""
    return simulate(SimConfig(**SMALL_CONFIG))


@pytest.fixture(scope="session")
def small_lab_config(tmp_path_factory):
    """A lab config file around the small run with quick training."""
    path = tmp_path_factory.mktemp("config") / "lab.yaml"
    lab = {
        "simulation": SMALL_CONFIG,
        "train": {"n_trees": 10, "max_depth": 3},
        "importance": {"n_estimators": 5},
    }
    with path.open("w") as f:
        YAML(typ="safe", pure=True).dump(lab, f)
    return path


def pytest_itemcollected(item):
    """Make tests names more readable in the tests output."""
    item._nodeid = (
        item._nodeid.replace(".py", "")
        .replace("tests/", "")
        .replace("test_", "")
        .replace("_", " ")
        .replace("Test", "")
        .replace("Class", " class")
        .lower()
    )
    doc = item.obj.__doc__.strip() if item.obj.__doc__ else ""
    if doc:
        item._nodeid = item._nodeid.split("::")[0] + "::" + doc
