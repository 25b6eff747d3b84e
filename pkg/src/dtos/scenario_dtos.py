from enum import Enum
from typing import List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.dtos.physics_dtos import PhysicsConfig
from src.dtos.stepping_dtos import LTSConfig


class Scheme(str, Enum):
    RK4 = "RK4"
    FBRK32 = "FBRK32"
    RK32 = "RK32"
    FBLTS = "FBLTS"


class MeshSpec(BaseModel):
    """
    Either a generated doubly periodic hex mesh or a mesh file.
    """

    model_config = ConfigDict(frozen=True)

    nx: Optional[int] = Field(None, ge=4, description="Cells per row.")
    ny: Optional[int] = Field(None, ge=4, description="Rows (even).")
    dc: Optional[float] = Field(None, gt=0, description="Cell spacing (m).")
    path: Optional[str] = Field(None, description="Mesh JSON file to load instead of generating.")
    coriolis: float = Field(1e-4, description="Uniform f on generated meshes (s^-1).")

    @model_validator(mode="after")
    def _generate_or_load(self) -> "MeshSpec":
        if self.path is None and None in (self.nx, self.ny, self.dc):
            raise ValueError("mesh needs either `path` or all of `nx`, `ny`, `dc`")
        return self


class InitialConditionConfig(BaseModel):
    """
    Gaussian bump in thickness on a resting (or uniformly moving) layer.
    """

    model_config = ConfigDict(frozen=True)

    amplitude: float = Field(1.0, description="Bump height (m).")
    width: float = Field(..., gt=0, description="Gaussian e-folding width (m).")
    centerX: Optional[float] = Field(None, description="Bump centre x (m); domain centre if omitted.")
    centerY: Optional[float] = Field(None, description="Bump centre y (m); domain centre if omitted.")
    backgroundDepth: float = Field(100.0, gt=0, description="Resting depth H (m).")
    fineDepth: Optional[float] = Field(
        None, gt=0, description="Resting depth on the fine region; the free surface stays flat."
    )
    backgroundVelocity: Tuple[float, float] = Field((0.0, 0.0), description="Uniform flow (m/s).")
    velocityNoise: float = Field(0.0, ge=0, description="Amplitude of seeded random edge velocity (m/s).")


class FineRegionSpec(BaseModel):
    """
    Which cells take the fine step. Labels denote step size, not cell size.
    """

    model_config = ConfigDict(frozen=True)

    kind: Literal["disk", "box", "band", "cells"]
    centerX: Optional[float] = None
    centerY: Optional[float] = None
    radius: Optional[float] = Field(None, gt=0)
    xMin: Optional[float] = None
    xMax: Optional[float] = None
    yMin: Optional[float] = None
    yMax: Optional[float] = None
    cells: Optional[List[int]] = None

    @model_validator(mode="after")
    def _required_fields(self) -> "FineRegionSpec":
        required = {
            "disk": ("centerX", "centerY", "radius"),
            "box": ("xMin", "xMax", "yMin", "yMax"),
            "band": ("xMin", "xMax"),
            "cells": ("cells",),
        }[self.kind]
        missing = [name for name in required if getattr(self, name) is None]
        if missing:
            raise ValueError(f"fine region of kind '{self.kind}' needs {', '.join(missing)}")
        return self


class ConvergenceConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    dtList: List[float] = Field(default_factory=lambda: [40.0, 20.0, 10.0, 5.0], min_length=2)
    referenceDt: Optional[float] = Field(None, gt=0, description="RK4 reference step; min(dtList)/10 if omitted.")

    @model_validator(mode="after")
    def _reference_small_enough(self) -> "ConvergenceConfig":
        if any(dt <= 0 for dt in self.dtList):
            raise ValueError("dtList entries must be positive")
        if self.referenceDt is not None and self.referenceDt > min(self.dtList) / 8:
            raise ValueError("referenceDt must be at most min(dtList)/8")
        return self

    @property
    def reference_dt(self) -> float:
        return self.referenceDt if self.referenceDt is not None else min(self.dtList) / 10


class CflScanConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    schemes: List[Scheme] = Field(default_factory=lambda: [Scheme.FBRK32, Scheme.RK32])
    testSteps: Optional[int] = Field(None, ge=1, description="Coarse steps per stability trial.")
    dtStart: float = Field(1.0, gt=0, description="Initial stable guess for the bracket (s).")
    relativeWidth: float = Field(0.01, gt=0, lt=1)
    growthLimit: float = Field(10.0, gt=1, description="max|u| growth factor that counts as unstable.")
    maxM: int = Field(8, ge=1)


class PerfConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    rk4Dt: float = Field(..., gt=0)
    fbrk32Dt: float = Field(..., gt=0, description="Global FB-RK(3,2) step, normally the fine step.")
    fbltsDt: float = Field(..., gt=0, description="FB-LTS coarse step.")
    intervals: int = Field(1, ge=1, description="Repeat the common interval this many times.")


class ConservationConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    nSteps: int = Field(200, ge=1)


class ScenarioConfig(BaseModel):
    """
    Top-level scenario file. Parsed from YAML/JSON by the CLI.
    """

    model_config = ConfigDict(frozen=True)

    mesh: MeshSpec
    initialCondition: InitialConditionConfig
    physics: PhysicsConfig = Field(default_factory=PhysicsConfig)
    scheme: Scheme = Scheme.FBLTS
    timeStepping: LTSConfig
    fineRegion: Optional[FineRegionSpec] = None
    splitting: bool = False
    runLength: float = Field(..., gt=0, description="Simulated duration (s).")
    outputDir: Optional[str] = None
    seed: Optional[int] = Field(None, ge=0)
    convergence: ConvergenceConfig = Field(default_factory=ConvergenceConfig)
    cflScan: CflScanConfig = Field(default_factory=CflScanConfig)
    perf: Optional[PerfConfig] = None
    conservation: ConservationConfig = Field(default_factory=ConservationConfig)

    @model_validator(mode="after")
    def _lts_needs_fine_region(self) -> "ScenarioConfig":
        if self.scheme == Scheme.FBLTS and self.fineRegion is None:
            raise ValueError("scheme FBLTS requires a fineRegion")
        return self
