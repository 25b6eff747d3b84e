from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from src.services.errors import InternalConsistencyError
from src.services.lts.labels import LTSLabels, Region
from src.services.operators.trisk import TriskOperators

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class VorticityFluxRecord:
    """
    Edge vorticity fluxes of one completed step. Global schemes fill only
    `coarse`; FB-LTS adds one flux per fine subcycle.
    """

    dt: float
    coarse: np.ndarray
    subcycles: Tuple[np.ndarray, ...] = ()

    @property
    def M(self) -> int:
        return max(1, len(self.subcycles))

    @property
    def is_lts(self) -> bool:
        return bool(self.subcycles)


class VorticityFluxRecorder:
    """Holds the flux record of the most recent step until it is taken."""

    def __init__(self) -> None:
        self.last: Optional[VorticityFluxRecord] = None

    def record_global(self, dt: float, flux: np.ndarray) -> None:
        self.last = VorticityFluxRecord(dt=dt, coarse=flux)

    def record_lts(self, dt: float, coarse: np.ndarray, subcycles: Sequence[np.ndarray]) -> None:
        self.last = VorticityFluxRecord(dt=dt, coarse=coarse, subcycles=tuple(subcycles))

    def take(self) -> VorticityFluxRecord:
        if self.last is None:
            raise InternalConsistencyError("no vorticity flux recorded for this step")
        record, self.last = self.last, None
        return record


def step_prognostic_vorticity(
    eta: np.ndarray,
    record: Optional[VorticityFluxRecord],
    operators: TriskOperators,
    labels: Optional[LTSLabels] = None,
) -> np.ndarray:
    """
    Advance the companion absolute vorticity by one step. An LTS record is
    replayed with the thickness structure on the dual mesh: fine dual cells
    subcycle, interface dual cells take dt/M times the summed tendencies and
    interior dual cells take the coarse flux.
    """
    if record is None:
        raise InternalConsistencyError("missing vorticity flux record")
    theta_coarse = operators.vorticity_tendency_from_flux(record.coarse)
    if not record.is_lts:
        return eta + record.dt * theta_coarse
    if labels is None:
        raise InternalConsistencyError("an LTS flux record needs the region labels")

    fdt = record.dt / record.M
    current = eta.copy()
    summed = np.zeros_like(eta)
    for flux in record.subcycles:
        theta = operators.vorticity_tendency_from_flux(flux)
        current = current + fdt * theta
        summed = summed + theta

    cls = labels.vertexClass
    fine = cls == Region.FINE
    interface = (cls == Region.IF1) | (cls == Region.IF2)
    interior = cls == Region.COARSE_INT
    out = eta.copy()
    out[fine] = current[fine]
    out[interface] = eta[interface] + fdt * summed[interface]
    out[interior] = eta[interior] + record.dt * theta_coarse[interior]
    return out
