from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from src.dtos.physics_dtos import PhysicsConfig
from src.dtos.scenario_dtos import Scheme
from src.dtos.stepping_dtos import FBWeights, LTSConfig
from src.services.diagnostics import (
    RunRecord,
    RunRecordRow,
    VorticityFluxRecorder,
    step_prognostic_vorticity,
    total_absolute_vorticity,
    total_mass,
    total_pv_volume,
)
from src.services.errors import FbltsError, PositivityError
from src.services.lts.labels import LTSLabels
from src.services.lts.stepper import fblts_step
from src.services.mesh import Mesh
from src.services.operators import FullTendencySource, State, TriskOperators, WorkCounters
from src.services.splitting import SplitTendencySource
from src.services.steppers import StepContext, courant_number, fbrk32_step, rk4_step
from src.utils.progress import progress_bar
from src.utils.timing import PhaseTimer

logger = logging.getLogger(__name__)


class InstabilityError(FbltsError, RuntimeError):
    """max|u| grew past the configured limit."""


@dataclass
class RunResult:
    record: RunRecord
    state: State
    eta: np.ndarray
    steps: int


def steps_for(run_length: float, dt: float) -> int:
    n = run_length / dt
    steps = int(round(n))
    if not math.isclose(steps, n, rel_tol=1e-9, abs_tol=1e-9):
        steps = int(math.ceil(n))
        logger.warning("run length %.6g is not a multiple of dt=%.6g; running %d steps", run_length, dt, steps)
    return max(steps, 1)


class SimulationRunner:
    """
    Steps one scheme on one mesh and records per-step diagnostics. The
    prognostic vorticity companion is advanced from the fluxes each step
    records, next to the diagnostic vorticity of the state.
    """

    def __init__(
        self,
        mesh: Mesh,
        scheme: Scheme,
        stepping: LTSConfig,
        physics: Optional[PhysicsConfig] = None,
        *,
        labels: Optional[LTSLabels] = None,
        splitting: bool = False,
        velocity_limit: Optional[float] = None,
        record_vorticity: bool = True,
    ) -> None:
        if scheme is Scheme.FBLTS and labels is None:
            raise ValueError("FBLTS needs region labels")
        self.mesh = mesh
        self.scheme = scheme
        self.stepping = stepping
        self.physics = physics or PhysicsConfig()
        self.labels = labels
        self.splitting = splitting
        self.velocity_limit = velocity_limit

        self.operators = TriskOperators(mesh, self.physics)
        self.counters = WorkCounters()
        if splitting:
            self.source = SplitTendencySource(self.operators, self.counters)
        else:
            self.source = FullTendencySource(self.operators, self.counters)
        self.recorder = VorticityFluxRecorder() if record_vorticity else None
        self.timer = PhaseTimer()
        weights = FBWeights.zero() if scheme is Scheme.RK32 else stepping.weights
        self.ctx = StepContext(
            dt=stepping.dt, source=self.source, weights=weights, recorder=self.recorder, timer=self.timer
        )
        self._step: Callable[[State], State] = self._stepper()

    def _stepper(self) -> Callable[[State], State]:
        if self.scheme is Scheme.RK4:
            return lambda s: rk4_step(s, self.ctx)
        if self.scheme is Scheme.FBLTS:
            return lambda s: fblts_step(s, self.labels, self.ctx, self.stepping.M, self.stepping.haloPolicy)
        return lambda s: fbrk32_step(s, self.ctx)

    def step(self, state: State) -> State:
        if self.splitting:
            self.source.freeze(state)
        return self._step(state)

    def _row(self, step: int, state: State, eta: np.ndarray, before: WorkCounters, walls: dict) -> RunRecordRow:
        work = self.counters.since(before)
        pv_volume, _ = total_pv_volume(state, eta, self.mesh)
        diagnostic = self.operators.vorticity_fields(state.u, state.h).eta
        return RunRecordRow(
            step=step,
            time=state.t,
            total_mass=total_mass(state, self.mesh),
            total_abs_vorticity=total_absolute_vorticity(eta, self.mesh),
            pv_volume=pv_volume,
            max_courant=courant_number(state, self.mesh, self.stepping.dt, self.physics.g)[0],
            fast_cell_evals=work.fast_cell_evals,
            fast_edge_evals=work.fast_edge_evals,
            slow_cell_evals=work.slow_cell_evals,
            slow_edge_evals=work.slow_edge_evals,
            wall_coarse=walls.get("coarse", 0.0),
            wall_predict=walls.get("predict", 0.0),
            wall_fine=walls.get("fine", 0.0),
            wall_correct=walls.get("correct", 0.0),
            wall_global=walls.get("global", 0.0),
            vorticity_gap=float(np.max(np.abs(eta - diagnostic))) if eta.size else 0.0,
        )

    def run(self, state0: State, n_steps: int, *, progress: bool = False, label: str = "") -> RunResult:
        """
        Advance `n_steps` coarse steps. PositivityError propagates tagged
        with the step index; exceeding `velocity_limit` raises InstabilityError.
        """
        state = state0
        eta = self.operators.vorticity_fields(state.u, state.h).eta
        record = RunRecord()
        record.append(self._row(0, state, eta, self.counters.snapshot(), {}))

        for n in progress_bar(range(1, n_steps + 1), enabled=progress, desc=label or self.scheme.value):
            before = self.counters.snapshot()
            walls_before = dict(self.timer.seconds)
            try:
                state = self.step(state)
            except PositivityError as exc:
                raise exc.tagged(step=n)
            if self.recorder is not None:
                eta = step_prognostic_vorticity(eta, self.recorder.take(), self.operators, self.labels)
            walls = {k: v - walls_before.get(k, 0.0) for k, v in self.timer.seconds.items()}
            row = self._row(n, state, eta, before, walls)
            record.append(row)
            logger.debug("step %d t=%.3f mass=%.17g courant=%.4f", n, state.t, row.total_mass, row.max_courant)

            if self.velocity_limit is not None:
                peak = float(np.max(np.abs(state.u)))
                if not np.isfinite(peak) or peak > self.velocity_limit:
                    raise InstabilityError(f"max|u| = {peak:.4g} exceeds {self.velocity_limit:.4g} at step {n}")
        return RunResult(record=record, state=state, eta=eta, steps=n_steps)
