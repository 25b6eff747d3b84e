from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from src.dtos.scenario_dtos import Scheme
from src.repositories.output_repository import OutputRepository
from src.services.diagnostics import relative_drift, rms_error, speedup
from src.services.errors import FbltsError, PositivityError
from src.services.harness.runner import InstabilityError, RunResult, SimulationRunner, steps_for
from src.services.harness.scenario import Scenario
from src.services.lts.labels import Region
from src.services.lts.work_model import closed_form_counts, global_counts, rk4_counts

logger = logging.getLogger(__name__)


def reference_speed(scenario: Scenario) -> float:
    """Velocity scale for the blow-up test: initial max|u| or the bump's linear wave speed."""
    ic = scenario.config.initialCondition
    g = scenario.config.physics.g
    wave = abs(ic.amplitude) * math.sqrt(g / ic.backgroundDepth)
    return max(float(np.max(np.abs(scenario.state0.u))) if scenario.state0.u.size else 0.0, wave)


def make_runner(
    scenario: Scenario,
    scheme: Scheme,
    *,
    dt: Optional[float] = None,
    M: Optional[int] = None,
    velocity_limit: Optional[float] = None,
    record_vorticity: bool = True,
) -> SimulationRunner:
    cfg = scenario.config
    stepping = cfg.timeStepping
    updates = {}
    if dt is not None:
        updates["dt"] = dt
    if M is not None:
        updates["M"] = M
    if updates:
        stepping = stepping.model_copy(update=updates)
    return SimulationRunner(
        scenario.mesh,
        scheme,
        stepping,
        cfg.physics,
        labels=scenario.labels,
        splitting=cfg.splitting,
        velocity_limit=velocity_limit,
        record_vorticity=record_vorticity,
    )


# -- run ------------------------------------------------------------------


def run_scenario(
    scenario: Scenario, out_dir: Optional[Path] = None, *, progress: bool = False, growth_limit: float = 10.0
) -> RunResult:
    """
    Step the configured scheme to `runLength`; write record.csv, state_final.csv
    and config_resolved.yaml when `out_dir` is given. Aborts propagate.
    """
    cfg = scenario.config
    limit = growth_limit * reference_speed(scenario)
    runner = make_runner(scenario, cfg.scheme, velocity_limit=limit)
    n_steps = steps_for(cfg.runLength, cfg.timeStepping.dt)
    logger.info("running %s: %d steps of %.6g s", cfg.scheme.value, n_steps, cfg.timeStepping.dt)
    result = runner.run(scenario.state0, n_steps, progress=progress)

    if out_dir is not None:
        repo = OutputRepository(out_dir)
        repo.write_record(result.record)
        repo.write_state(scenario.mesh, result.state, scenario.labels)
        repo.write_config(cfg)
    mass = result.record.column("total_mass")
    logger.info("finished at t=%.3f, relative mass drift %.3e", result.state.t, relative_drift(mass))
    return result


# -- convergence ------------------------------------------------------------


def _order(e_coarse: float, e_fine: float, ratio: float) -> float:
    if not (e_coarse > 0 and e_fine > 0):
        return float("nan")
    return math.log(e_coarse / e_fine) / math.log(ratio)


def convergence_driver(
    scenario: Scenario,
    dt_list: Optional[Sequence[float]] = None,
    reference_dt: Optional[float] = None,
    M: int = 4,
    scheme: Scheme = Scheme.FBLTS,
) -> pd.DataFrame:
    """
    RMS error of `scheme` at each coarse dt against an RK4 run at
    `reference_dt`, globally and on IF1 only, with observed orders between
    consecutive dts. Unstable runs are flagged, not raised.
    """
    conv = scenario.config.convergence
    dts = sorted(dt_list if dt_list is not None else conv.dtList, reverse=True)
    if reference_dt is not None:
        ref_dt = reference_dt
    elif conv.referenceDt is not None:
        ref_dt = conv.referenceDt
    else:
        ref_dt = min(dts) / 10
    if ref_dt > min(dts) / 8:
        raise ValueError("reference dt must be at most min(dtList)/8")
    T = scenario.config.runLength

    reference = make_runner(scenario, Scheme.RK4, dt=ref_dt, record_vorticity=False).run(
        scenario.state0, steps_for(T, ref_dt)
    ).state

    labels = scenario.labels
    if1_cells = labels.cells_in(Region.IF1) if labels is not None else np.empty(0, dtype=np.int64)
    if1_edges = labels.edges_in(Region.IF1) if labels is not None else np.empty(0, dtype=np.int64)

    rows: List[Dict] = []
    for dt in dts:
        row = {"dt": dt, "stable": True}
        try:
            state = make_runner(scenario, scheme, dt=dt, M=M, record_vorticity=False).run(
                scenario.state0, steps_for(T, dt)
            ).state
        except FbltsError as exc:
            logger.warning("dt=%.6g unstable: %s", dt, exc)
            row.update(stable=False, rms_h=np.nan, rms_u=np.nan, rms_h_if1=np.nan, rms_u_if1=np.nan)
            rows.append(row)
            continue
        row.update(
            rms_h=rms_error(state.h, reference.h),
            rms_u=rms_error(state.u, reference.u),
            rms_h_if1=rms_error(state.h[if1_cells], reference.h[if1_cells]),
            rms_u_if1=rms_error(state.u[if1_edges], reference.u[if1_edges]),
        )
        rows.append(row)

    table = pd.DataFrame(rows)
    for col in ("rms_h", "rms_u", "rms_h_if1", "rms_u_if1"):
        orders = [np.nan]
        for prev, cur in zip(rows[:-1], rows[1:]):
            orders.append(_order(prev[col], cur[col], prev["dt"] / cur["dt"]))
        table["order_" + col[4:]] = orders
    logger.info("convergence table:\n%s", table.to_string(index=False))
    return table


# -- CFL scan -----------------------------------------------------------------


@dataclass(frozen=True)
class CflResult:
    scheme: str
    M: int
    max_stable_dt: float
    unstable_dt: float
    trials: int


def is_stable(scenario: Scenario, scheme: Scheme, dt: float, test_steps: int, growth_limit: float, M: int = 1) -> bool:
    """Unstable iff a positivity abort or max|u| beyond growth_limit times the reference speed."""
    limit = growth_limit * reference_speed(scenario)
    runner = make_runner(scenario, scheme, dt=dt, M=M, velocity_limit=limit, record_vorticity=False)
    try:
        runner.run(scenario.state0, test_steps)
    except (PositivityError, InstabilityError) as exc:
        logger.debug("%s dt=%.6g M=%d unstable: %s", scheme.value, dt, M, exc)
        return False
    return True


def bisect_max_dt(
    stable, dt_start: float, relative_width: float = 0.01, max_expansions: int = 40
) -> tuple[float, float, int]:
    """
    Largest dt with stable(dt) True, bracketed by doubling/halving from
    dt_start and bisected until (hi - lo) / lo <= relative_width.
    Returns (lo, hi, trials).
    """
    trials = 0
    lo, hi = None, None
    dt = dt_start
    for _ in range(max_expansions):
        trials += 1
        if stable(dt):
            lo = dt
            if hi is not None:
                break
            dt *= 2.0
        else:
            hi = dt
            if lo is not None:
                break
            dt *= 0.5
    if lo is None or hi is None:
        raise RuntimeError("could not bracket the stability limit")
    while (hi - lo) / lo > relative_width:
        mid = 0.5 * (lo + hi)
        trials += 1
        if stable(mid):
            lo = mid
        else:
            hi = mid
    return lo, hi, trials


def cfl_scan(
    scenario: Scenario,
    schemes: Optional[Sequence[Scheme]] = None,
    test_steps: Optional[int] = None,
    *,
    default_test_steps: int = 200,
) -> pd.DataFrame:
    """
    Max stable dt per scheme by bisection. FBLTS is scanned fine-first:
    the fine dt at M = 1, then the largest M stable at M times that dt;
    the (M, max coarse dt) frontier is reported alongside.
    """
    cfg = scenario.config.cflScan
    schemes = list(schemes if schemes is not None else cfg.schemes)
    steps = test_steps or cfg.testSteps or default_test_steps
    rows: List[CflResult] = []

    for scheme in schemes:
        if scheme is Scheme.FBLTS:
            rows.extend(_scan_lts(scenario, steps))
            continue
        lo, hi, trials = bisect_max_dt(
            lambda dt: is_stable(scenario, scheme, dt, steps, cfg.growthLimit), cfg.dtStart, cfg.relativeWidth
        )
        logger.info("%s: max stable dt %.6g (unstable at %.6g)", scheme.value, lo, hi)
        rows.append(CflResult(scheme.value, 1, lo, hi, trials))

    table = pd.DataFrame([asdict(r) for r in rows])
    by_scheme = {r.scheme: r.max_stable_dt for r in rows if r.M == 1}
    if Scheme.FBRK32.value in by_scheme and Scheme.RK32.value in by_scheme:
        ratio = by_scheme[Scheme.FBRK32.value] / by_scheme[Scheme.RK32.value]
        logger.info("FB-RK(3,2) / RK(3,2) max dt ratio: %.3f (companion range 1.6-2.2)", ratio)
    return table


def _scan_lts(scenario: Scenario, steps: int) -> List[CflResult]:
    cfg = scenario.config.cflScan
    results: List[CflResult] = []
    fine_dt, _, _ = bisect_max_dt(
        lambda dt: is_stable(scenario, Scheme.FBLTS, dt, steps, cfg.growthLimit, M=1), cfg.dtStart, cfg.relativeWidth
    )
    best_m = 1
    for M in range(2, cfg.maxM + 1):
        if not is_stable(scenario, Scheme.FBLTS, M * fine_dt, steps, cfg.growthLimit, M=M):
            break
        best_m = M
    logger.info("FBLTS fine-first: fine dt %.6g, largest M %d (coarse dt %.6g)", fine_dt, best_m, best_m * fine_dt)
    results.append(CflResult("FBLTS-fine-first", best_m, best_m * fine_dt, float("nan"), 0))

    for M in range(1, cfg.maxM + 1):
        lo, hi, trials = bisect_max_dt(
            lambda dt, M=M: is_stable(scenario, Scheme.FBLTS, dt, steps, cfg.growthLimit, M=M),
            cfg.dtStart, cfg.relativeWidth,
        )
        results.append(CflResult(Scheme.FBLTS.value, M, lo, hi, trials))
    return results


# -- performance --------------------------------------------------------------


def common_interval(*dts: float) -> float:
    """Least common multiple of the time steps (as exact fractions)."""
    fractions = [Fraction(dt).limit_denominator(10**6) for dt in dts]
    num = 1
    den = 0
    for f in fractions:
        num = math.lcm(num, f.numerator)
        den = math.gcd(den, f.denominator)
    return float(Fraction(num, den))


def perf_driver(scenario: Scenario) -> pd.DataFrame:
    """
    RK4, global FB-RK(3,2) and FB-LTS over the same simulated interval:
    wall time, measured eval counts, closed-form counts and speedups.
    """
    cfg = scenario.config
    if cfg.perf is None:
        raise ValueError("scenario has no `perf` section")
    perf = cfg.perf
    M = cfg.timeStepping.M
    T = common_interval(perf.rk4Dt, perf.fbrk32Dt, perf.fbltsDt) * perf.intervals
    slow_terms = cfg.physics.has_slow_terms
    mesh = scenario.mesh

    plans = [
        (Scheme.RK4, perf.rk4Dt),
        (Scheme.FBRK32, perf.fbrk32Dt),
        (Scheme.FBLTS, perf.fbltsDt),
    ]
    rows = []
    for scheme, dt in plans:
        steps = steps_for(T, dt)
        runner = make_runner(scenario, scheme, dt=dt, record_vorticity=False)
        result = runner.run(scenario.state0, steps)
        totals = result.record.totals()
        if scheme is Scheme.RK4:
            model = rk4_counts(mesh.nCells, mesh.nEdges, steps, split=cfg.splitting, slow_terms=slow_terms)
        elif scheme is Scheme.FBRK32:
            model = global_counts(mesh.nCells, mesh.nEdges, steps, split=cfg.splitting, slow_terms=slow_terms)
        else:
            one = closed_form_counts(
                scenario.labels, M, cfg.timeStepping.haloPolicy, split=cfg.splitting, slow_terms=slow_terms
            )
            model = type(one)(*(steps * v for v in (
                one.fast_cell_evals, one.fast_edge_evals, one.slow_cell_evals, one.slow_edge_evals
            )))
        wall = sum(totals[k] for k in ("wall_coarse", "wall_predict", "wall_fine", "wall_correct", "wall_global"))
        rows.append({
            "scheme": scheme.value,
            "dt": dt,
            "steps": steps,
            "simulated_seconds": T,
            "wall_seconds": wall,
            "fast_cell_evals": totals["fast_cell_evals"],
            "fast_edge_evals": totals["fast_edge_evals"],
            "slow_edge_evals": totals["slow_edge_evals"],
            "model_fast_cell_evals": model.fast_cell_evals,
            "model_fast_edge_evals": model.fast_edge_evals,
            "counts_match": (
                totals["fast_cell_evals"] == model.fast_cell_evals
                and totals["fast_edge_evals"] == model.fast_edge_evals
                and totals["slow_edge_evals"] == model.slow_edge_evals
            ),
        })

    table = pd.DataFrame(rows)
    walls = dict(zip(table["scheme"], table["wall_seconds"]))
    table["speedup_vs_rk4"] = [_safe_speedup(walls[Scheme.RK4.value], w) for w in table["wall_seconds"]]
    table["speedup_vs_fbrk32"] = [_safe_speedup(walls[Scheme.FBRK32.value], w) for w in table["wall_seconds"]]
    logger.info("performance:\n%s", table.to_string(index=False))
    return table


def _safe_speedup(baseline: float, candidate: float) -> float:
    try:
        return speedup(baseline, candidate)
    except ValueError:
        return float("nan")


# -- conservation ---------------------------------------------------------------


@dataclass(frozen=True)
class DriftReport:
    steps: int
    mass_drift: float
    vorticity_drift: float
    pv_volume_drift: float
    max_vorticity_gap: float

    def as_frame(self) -> pd.DataFrame:
        return pd.DataFrame([asdict(self)])


def conservation_driver(scenario: Scenario, n_steps: Optional[int] = None, *, progress: bool = False) -> DriftReport:
    """Max relative drift of mass, prognostic absolute vorticity and PV volume over n_steps."""
    n_steps = n_steps or scenario.config.conservation.nSteps
    runner = make_runner(scenario, scenario.config.scheme)
    record = runner.run(scenario.state0, n_steps, progress=progress, label="conserve").record
    report = DriftReport(
        steps=n_steps,
        mass_drift=relative_drift(record.column("total_mass")),
        vorticity_drift=relative_drift(record.column("total_abs_vorticity")),
        pv_volume_drift=relative_drift(record.column("pv_volume")),
        max_vorticity_gap=float(max(record.column("vorticity_gap"))),
    )
    logger.info(
        "drifts over %d steps: mass %.3e, vorticity %.3e, pv %.3e",
        n_steps, report.mass_drift, report.vorticity_drift, report.pv_volume_drift,
    )
    return report
