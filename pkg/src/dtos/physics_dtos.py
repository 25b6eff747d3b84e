from typing import Tuple

from pydantic import BaseModel, ConfigDict, Field


class PhysicsConfig(BaseModel):
    """
    Physical constants and term switches for the tendency operators.
    f and the bottom elevation live on the mesh; this model only decides
    which terms are active.
    """

    model_config = ConfigDict(frozen=True)

    g: float = Field(9.80665, gt=0, description="Gravitational acceleration (m/s^2).")
    rotationOn: bool = Field(True, description="Include the Coriolis parameter f in the absolute vorticity.")
    advectionOn: bool = Field(
        True,
        description="Include relative vorticity in the PV flux and the kinetic-energy gradient.",
    )
    dragCoefficient: float = Field(0.0, ge=0, description="Bottom drag coefficient C_D.")
    windCoefficient: float = Field(0.0, ge=0, description="Wind stress coefficient C_W.")
    windVelocity: Tuple[float, float] = Field(
        (0.0, 0.0), description="Fixed wind vector (m/s) in the mesh plane."
    )

    @property
    def has_slow_terms(self) -> bool:
        return (
            self.rotationOn
            or self.advectionOn
            or self.dragCoefficient > 0
            or self.windCoefficient > 0
        )

    @classmethod
    def gravity_wave(cls, g: float = 9.80665) -> "PhysicsConfig":
        """Linear gravity-wave subsystem: every slow term switched off."""
        return cls(g=g, rotationOn=False, advectionOn=False)
