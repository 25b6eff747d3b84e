from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Optional

from src.dtos.stepping_dtos import FBWeights
from src.services.operators.sources import TendencySource
from src.services.operators.state import WorkCounters
from src.utils.timing import PhaseTimer

if TYPE_CHECKING:
    from src.services.diagnostics.vorticity import VorticityFluxRecorder


@dataclass
class StepContext:
    """Everything a single step needs besides the state."""

    dt: float
    source: TendencySource
    weights: FBWeights = field(default_factory=FBWeights)
    recorder: Optional["VorticityFluxRecorder"] = None
    timer: Optional[PhaseTimer] = None

    def __post_init__(self) -> None:
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.timer is None:
            self.timer = PhaseTimer()

    @property
    def counters(self) -> WorkCounters:
        return self.source.counters
