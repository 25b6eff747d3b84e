from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from src.services.errors import PositivityError
from src.services.operators.state import State
from src.services.steppers.context import StepContext
from src.services.steppers.stages import advance, check_positive, fb_average, fb_average_final

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FBStageData:
    """
    Every intermediate of one FB-RK(3,2) step. Nothing is overwritten in
    place, so the LTS code and the tests can read stage values afterwards.
    """

    h1: np.ndarray
    u1: np.ndarray
    hs: np.ndarray
    h2: np.ndarray
    u2: np.ndarray
    hss: np.ndarray
    h3: np.ndarray
    u3: np.ndarray
    hsss: np.ndarray


def fbrk32_stages(state: State, ctx: StepContext) -> FBStageData:
    src, w, dt = ctx.source, ctx.weights, ctx.dt
    h, u = state.h, state.u
    try:
        h1 = advance(h, dt / 3.0, src.thickness(u, h))
        check_positive(h1, stage=1)
        hs = fb_average(w.beta1, h1, h)
        u1 = advance(u, dt / 3.0, src.momentum(u, hs))

        h2 = advance(h, dt / 2.0, src.thickness(u1, h1))
        check_positive(h2, stage=2)
        hss = fb_average(w.beta2, h2, h)
        u2 = advance(u, dt / 2.0, src.momentum(u1, hss))

        h3 = advance(h, dt, src.thickness(u2, h2))
        check_positive(h3, stage=3)
        hsss = fb_average_final(w.beta3, h3, h2, h)
        u3 = advance(u, dt, src.momentum(u2, hsss))
    except PositivityError as exc:
        raise exc.tagged(region="global")
    return FBStageData(h1=h1, u1=u1, hs=hs, h2=h2, u2=u2, hss=hss, h3=h3, u3=u3, hsss=hsss)


def fbrk32_step(state: State, ctx: StepContext) -> State:
    """
    One forward-backward RK(3,2) step. Stage momentum updates read the
    FB-averaged thickness; weights (0, 0, 0) give plain RK(3,2).
    """
    with ctx.timer.phase("global"):
        stages = fbrk32_stages(state, ctx)
        if ctx.recorder is not None:
            ctx.recorder.record_global(ctx.dt, ctx.source.vorticity_flux(stages.u2, stages.hsss))
    return State(h=stages.h3, u=stages.u3, t=state.t + ctx.dt)
