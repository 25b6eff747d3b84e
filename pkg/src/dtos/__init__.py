"""
Validated configuration models (pydantic v2).
"""

from .physics_dtos import PhysicsConfig
from .scenario_dtos import (
    CflScanConfig,
    ConservationConfig,
    ConvergenceConfig,
    FineRegionSpec,
    InitialConditionConfig,
    MeshSpec,
    PerfConfig,
    ScenarioConfig,
    Scheme,
)
from .stepping_dtos import FBWeights, HaloPolicy, LTSConfig

__all__ = [
    "CflScanConfig",
    "ConservationConfig",
    "ConvergenceConfig",
    "FBWeights",
    "FineRegionSpec",
    "HaloPolicy",
    "InitialConditionConfig",
    "LTSConfig",
    "MeshSpec",
    "PerfConfig",
    "PhysicsConfig",
    "ScenarioConfig",
    "Scheme",
]
