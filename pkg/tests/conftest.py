import copy

import numpy as np
import pytest

from src.dtos.physics_dtos import PhysicsConfig
from src.dtos.scenario_dtos import ScenarioConfig
from src.services.harness import build_scenario
from src.services.mesh import build_periodic_hex_mesh, with_fields
from src.services.operators import FullTendencySource, State, TriskOperators, WorkCounters

DC = 5000.0
DEPTH = 100.0
NX = NY = 16
X_CENTRE = NX * DC / 2
Y_CENTRE = float(NY * DC * np.sqrt(3.0) / 4)

BASE_CONFIG = {
    "mesh": {"nx": NX, "ny": NY, "dc": DC, "coriolis": 1e-4},
    "initialCondition": {"amplitude": 1.0, "width": 10000.0, "backgroundDepth": DEPTH},
    "scheme": "FBLTS",
    "timeStepping": {"dt": 40.0, "M": 4},
    "fineRegion": {"kind": "disk", "centerX": X_CENTRE, "centerY": Y_CENTRE, "radius": 12000.0},
    "runLength": 400.0,
}


def merge(base: dict, overrides: dict) -> dict:
    out = copy.deepcopy(base)
    for key, value in overrides.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = merge(out[key], value)
        else:
            out[key] = value
    return out


@pytest.fixture
def config_dict():
    """A fresh copy of the base scenario: 16x16 mesh, Gaussian bump, disk fine region, M=4."""
    return copy.deepcopy(BASE_CONFIG)


@pytest.fixture
def make_scenario():
    def _make(**overrides):
        return build_scenario(ScenarioConfig.model_validate(merge(BASE_CONFIG, overrides)))

    return _make


@pytest.fixture(scope="session")
def small_mesh():
    """4x4 periodic hex mesh with dc = 1 km."""
    return build_periodic_hex_mesh(4, 4, 1000.0)


@pytest.fixture(scope="session")
def hex_mesh():
    mesh = build_periodic_hex_mesh(NX, NY, DC, coriolis=1e-4)
    return with_fields(mesh, restingDepth=np.full(mesh.nCells, DEPTH), bottomElevation=np.zeros(mesh.nCells))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def random_state(hex_mesh, rng):
    """Positive thickness around 100 m and O(1) m/s velocities."""
    h = DEPTH + rng.uniform(-1.0, 1.0, hex_mesh.nCells)
    u = rng.normal(0.0, 0.5, hex_mesh.nEdges)
    return State(h=h, u=u)


@pytest.fixture
def nonlinear_source(hex_mesh):
    return FullTendencySource(TriskOperators(hex_mesh, PhysicsConfig()), WorkCounters())
