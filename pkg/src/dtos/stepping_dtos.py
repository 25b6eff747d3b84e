from enum import Enum

from pydantic import BaseModel, ConfigDict, Field


class HaloPolicy(str, Enum):
    SHRINKING = "shrinking"
    F5 = "f5"
    ALL_FINE = "all_fine"


class FBWeights(BaseModel):
    """
    Forward-backward weights of FB-RK(3,2).
    (0, 0, 0) is the plain RK(3,2) baseline used in CFL comparisons.
    """

    model_config = ConfigDict(frozen=True)

    beta1: float = Field(0.531, ge=0, le=1)
    beta2: float = Field(0.531, ge=0, le=1)
    beta3: float = Field(0.313, ge=0, le=1)

    @classmethod
    def zero(cls) -> "FBWeights":
        return cls(beta1=0.0, beta2=0.0, beta3=0.0)


class LTSConfig(BaseModel):
    """
    Coarse step, subcycle count and weights.
    Global schemes read `dt` and `weights` and ignore the rest.
    """

    model_config = ConfigDict(frozen=True)

    dt: float = Field(..., gt=0, description="Coarse time-step (s).")
    M: int = Field(1, ge=1, description="Fine subcycles per coarse step.")
    weights: FBWeights = Field(default_factory=FBWeights)
    haloPolicy: HaloPolicy = Field(
        HaloPolicy.SHRINKING,
        description="Extent of the coarse stages on the fine-adjacent layers.",
    )
    stencilRadius: int = Field(2, ge=1, description="Operator stencil radius r in cell rings.")

    @property
    def fine_dt(self) -> float:
        return self.dt / self.M
