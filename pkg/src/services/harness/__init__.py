from .drivers import (
    CflResult,
    DriftReport,
    bisect_max_dt,
    cfl_scan,
    common_interval,
    conservation_driver,
    convergence_driver,
    is_stable,
    make_runner,
    perf_driver,
    reference_speed,
    run_scenario,
)
from .runner import InstabilityError, RunResult, SimulationRunner, steps_for
from .scenario import Scenario, build_mesh, build_scenario, fine_region_mask, initial_state

__all__ = [
    "CflResult",
    "DriftReport",
    "bisect_max_dt",
    "cfl_scan",
    "common_interval",
    "conservation_driver",
    "convergence_driver",
    "is_stable",
    "make_runner",
    "perf_driver",
    "reference_speed",
    "run_scenario",
    "InstabilityError",
    "RunResult",
    "SimulationRunner",
    "steps_for",
    "Scenario",
    "build_mesh",
    "build_scenario",
    "fine_region_mask",
    "initial_state",
]
