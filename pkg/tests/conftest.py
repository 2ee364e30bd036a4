import json
import math
from pathlib import Path

import pytest

from nmopso import parse_scenario

REPO_ROOT = Path(__file__).resolve().parent.parent
BUNDLED_SCENARIO = REPO_ROOT / "scenarios" / "rolling_500m_6obs.json"


def scenario_doc(**overrides):
    """Baseline valid scenario document; flat terrain, no obstacles."""
    doc = {
        "terrain": {
            "generate": {
                "width": 12,
                "height": 12,
                "cellsize": 50.0,
                "roughness": 0.0,
                "seed": 0,
            }
        },
        "start": [50.0, 50.0, 80.0],
        "goal": [500.0, 500.0, 80.0],
        "obstacles": [],
        "drone_size": 1.0,
        "safe_distance": 5.0,
        "r_min": 1.0,
        "h_min": 10.0,
        "h_max": 150.0,
        "theta_max": math.pi / 4,
        "psi_max": math.pi / 4,
        "v_min": 0.0,
        "v_max": 20.0,
        "n_nodes": 10,
    }
    doc.update(overrides)
    return doc


def make_scenario(**overrides):
    return parse_scenario(json.dumps(scenario_doc(**overrides)))


@pytest.fixture
def flat_scenario():
    """Flat obstacle-free scenario whose band center sits at z = 80."""
    return make_scenario()


@pytest.fixture
def obstacle_scenario():
    """Flat scenario with one cylinder parked beside the start-goal line."""
    return make_scenario(obstacles=[{"x": 275.0, "y": 275.0, "radius": 40.0}])


@pytest.fixture(scope="session")
def bundled_scenario():
    return parse_scenario(BUNDLED_SCENARIO.read_text(), base_dir=BUNDLED_SCENARIO.parent)
