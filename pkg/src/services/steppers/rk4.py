from __future__ import annotations

from src.services.errors import PositivityError
from src.services.operators.state import State
from src.services.steppers.context import StepContext
from src.services.steppers.stages import advance, check_positive


def rk4_step(state: State, ctx: StepContext) -> State:
    """Classical four-stage RK4 on the coupled (u, h) system."""
    src, dt = ctx.source, ctx.dt
    h, u = state.h, state.u
    record = ctx.recorder is not None
    with ctx.timer.phase("global"):
        try:
            dh1, du1 = src.thickness(u, h), src.momentum(u, h)
            g1 = src.vorticity_flux(u, h) if record else None

            h2, u2 = advance(h, dt / 2.0, dh1), advance(u, dt / 2.0, du1)
            check_positive(h2, stage=1)
            dh2, du2 = src.thickness(u2, h2), src.momentum(u2, h2)
            g2 = src.vorticity_flux(u2, h2) if record else None

            h3, u3 = advance(h, dt / 2.0, dh2), advance(u, dt / 2.0, du2)
            check_positive(h3, stage=2)
            dh3, du3 = src.thickness(u3, h3), src.momentum(u3, h3)
            g3 = src.vorticity_flux(u3, h3) if record else None

            h4, u4 = advance(h, dt, dh3), advance(u, dt, du3)
            check_positive(h4, stage=3)
            dh4, du4 = src.thickness(u4, h4), src.momentum(u4, h4)
            g4 = src.vorticity_flux(u4, h4) if record else None

            h_new = h + (dt / 6.0) * (dh1 + 2.0 * dh2 + 2.0 * dh3 + dh4)
            check_positive(h_new, stage=4)
            u_new = u + (dt / 6.0) * (du1 + 2.0 * du2 + 2.0 * du3 + du4)
        except PositivityError as exc:
            raise exc.tagged(region="global")
        if record:
            ctx.recorder.record_global(dt, (g1 + 2.0 * g2 + 2.0 * g3 + g4) / 6.0)
    return State(h=h_new, u=u_new, t=state.t + dt)
