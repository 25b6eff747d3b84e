from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from src.dtos.stepping_dtos import HaloPolicy
from src.services.errors import PositivityError
from src.services.lts.extents import FineSelections, StageExtents, fine_selections, stage_extents
from src.services.lts.interface import InterfaceCache, correct_interface, predict_interface
from src.services.lts.labels import LTSLabels
from src.services.operators.state import State
from src.services.steppers.context import StepContext
from src.services.steppers.stages import advance, check_positive, fb_average, fb_average_final

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LTSPlan:
    """Row selections derived once from the labels and reused every step."""

    extents: StageExtents
    selections: FineSelections
    policy: HaloPolicy


def plan_for(labels: LTSLabels, policy: HaloPolicy = HaloPolicy.SHRINKING) -> LTSPlan:
    key = ("plan", policy)
    if key not in labels._cache:
        labels._cache[key] = LTSPlan(stage_extents(labels, policy), fine_selections(labels), policy)
    return labels._cache[key]


def _compose(coarse: np.ndarray, if1: np.ndarray, predicted: np.ndarray, fine: np.ndarray, current: np.ndarray) -> np.ndarray:
    """Coarse-phase values, overridden by predictions on IF1 and current values on the fine rows."""
    out = coarse.copy()
    out[if1] = predicted
    out[fine] = current[fine]
    return out


def coarse_advance(
    state: State, labels: LTSLabels, ctx: StepContext, policy: HaloPolicy = HaloPolicy.SHRINKING
) -> Tuple[State, InterfaceCache]:
    """
    All three FB-RK(3,2) stages at the coarse step on the coarse side and
    the shrinking fine halo. The interior ends at t^{n+1}; IF1/IF2 hold
    uncorrected stage data; halo values on fine rows are scratch.
    """
    plan = plan_for(labels, policy)
    ext, sel = plan.extents, plan.selections
    src, w, dt = ctx.source, ctx.weights, ctx.dt
    h, u = state.h, state.u
    try:
        h1 = advance(h, dt / 3.0, src.thickness(u, h, ext.h1), ext.h1)
        check_positive(h1, stage=1, rows=ext.h1)
        hs = fb_average(w.beta1, h1, h)
        u1 = advance(u, dt / 3.0, src.momentum(u, hs, ext.u1), ext.u1)

        h2 = advance(h, dt / 2.0, src.thickness(u1, h1, ext.h2), ext.h2)
        check_positive(h2, stage=2, rows=ext.h2)
        hss = fb_average(w.beta2, h2, h)
        u2 = advance(u, dt / 2.0, src.momentum(u1, hss, ext.u2), ext.u2)

        h3 = advance(h, dt, src.thickness(u2, h2, ext.h3), ext.h3)
        check_positive(h3, stage=3, rows=ext.h3)
        hsss = fb_average_final(w.beta3, h3, h2, h)
        u3 = advance(u, dt, src.momentum(u2, hsss, ext.u3), ext.u3)
    except PositivityError as exc:
        raise exc.tagged(region="coarse")

    cache = InterfaceCache(
        h_n=h, u_n=u,
        h1=h1, u1=u1, hs=hs,
        h2=h2, u2=u2, hss=hss,
        h3=h3, u3=u3, hsss=hsss,
        if1_cells=sel.if1_cells, if1_edges=sel.if1_edges,
        if_cells=sel.if_cells, if_edges=sel.if_edges,
    )
    return State(h=h3, u=u3, t=state.t + dt), cache


def fine_advance(
    state: State,
    labels: LTSLabels,
    cache: InterfaceCache,
    ctx: StepContext,
    M: int,
    policy: HaloPolicy = HaloPolicy.SHRINKING,
) -> Tuple[State, List[np.ndarray]]:
    """
    M FB-RK(3,2) steps of dt/M on the fine region, reading predicted IF1
    data across the interface. The stage-3 tendencies on IF1/IF2 are
    accumulated into the cache for the correction. Returns the state whose
    fine rows are at t^{n+1}, and the recorded vorticity fluxes per subcycle.
    """
    sel = plan_for(labels, policy).selections
    src, w = ctx.source, ctx.weights
    fdt = ctx.dt / M
    fc, fe = sel.fine_cells, sel.fine_edges
    fci, fei = fc.indices, fe.indices
    if1c, if1e = sel.if1_cells, sel.if1_edges
    record = ctx.recorder is not None

    cache.reset_accumulators()
    h_k, u_k = state.h.copy(), state.u.copy()
    fluxes: List[np.ndarray] = []
    for k in range(M):
        with ctx.timer.phase("predict"):
            pred = predict_interface(cache, k, M, w)
        with ctx.timer.phase("fine"):
            try:
                hb = _compose(cache.h_n, if1c, pred.h_base, fci, h_k)
                ub = _compose(cache.u_n, if1e, pred.u_base, fei, u_k)

                h1 = advance(hb, fdt / 3.0, src.thickness(ub, hb, fc), fc)
                check_positive(h1, stage=1, rows=fc)
                hs = _compose(cache.hs, if1c, pred.h_star, fci, fb_average(w.beta1, h1, hb))
                u1 = advance(ub, fdt / 3.0, src.momentum(ub, hs, fe), fe)

                h1c = _compose(cache.h1, if1c, pred.h_s1, fci, h1)
                u1c = _compose(cache.u1, if1e, pred.u_s1, fei, u1)
                h2 = advance(hb, fdt / 2.0, src.thickness(u1c, h1c, fc), fc)
                check_positive(h2, stage=2, rows=fc)
                hss = _compose(cache.hss, if1c, pred.h_star2, fci, fb_average(w.beta2, h2, hb))
                u2 = advance(ub, fdt / 2.0, src.momentum(u1c, hss, fe), fe)

                h2c = _compose(cache.h2, if1c, pred.h_s2, fci, h2)
                u2c = _compose(cache.u2, if1e, pred.u_s2, fei, u2)
                psi = src.thickness(u2c, h2c, sel.stage3_cells)
                h_next = advance(hb, fdt, psi[sel.stage3_cell_fine], fc)
                check_positive(h_next, stage=3, rows=fc)
                hsss = _compose(
                    cache.hsss, if1c, pred.h_star3, fci, fb_average_final(w.beta3, h_next, h2c, hb)
                )
                phi = src.momentum(u2c, hsss, sel.stage3_edges)
                u_next = advance(ub, fdt, phi[sel.stage3_edge_fine], fe)
            except PositivityError as exc:
                raise exc.tagged(region="fine", subcycle=k)

            cache.accumulate(psi[sel.stage3_cell_if], phi[sel.stage3_edge_if])
            if record:
                fluxes.append(src.vorticity_flux(u2c, hsss))
            h_k, u_k = h_next, u_next
    return State(h=h_k, u=u_k, t=state.t + ctx.dt), fluxes


def fblts_step(
    state: State,
    labels: LTSLabels,
    ctx: StepContext,
    M: int = 1,
    policy: HaloPolicy = HaloPolicy.SHRINKING,
) -> State:
    """
    One FB-LTS coarse step: coarse advancement, per-subcycle interface
    prediction inside the fine advancement, then the interface correction.
    Every cell and edge is written exactly once: interior from the coarse
    phase, fine rows from the last subcycle, IF1/IF2 from the correction.
    """
    sel = plan_for(labels, policy).selections
    with ctx.timer.phase("coarse"):
        coarse, cache = coarse_advance(state, labels, ctx, policy)
    fine, fluxes = fine_advance(state, labels, cache, ctx, M, policy)
    with ctx.timer.phase("correct"):
        h_if, u_if = correct_interface(cache, ctx.dt, M)
        h_new = coarse.h.copy()
        u_new = coarse.u.copy()
        h_new[sel.fine_cells.indices] = fine.h[sel.fine_cells.indices]
        u_new[sel.fine_edges.indices] = fine.u[sel.fine_edges.indices]
        h_new[sel.if_cells] = h_if
        u_new[sel.if_edges] = u_if
        if h_if.size and not h_if.min() > 0:
            bad = int(sel.if_cells[np.argmin(h_if)])
            raise PositivityError(f"corrected thickness {h_new[bad]:.6g} is not positive", region="interface", index=bad)

    if ctx.recorder is not None:
        ctx.recorder.record_lts(ctx.dt, ctx.source.vorticity_flux(cache.u2, cache.hsss), fluxes)
    return State(h=h_new, u=u_new, t=state.t + ctx.dt)
