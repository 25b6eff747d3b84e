import logging

import numpy as np
import pandas as pd
import pytest
import yaml

from src.dtos.scenario_dtos import Scheme
from src.repositories.output_repository import STATE_COLUMNS
from src.services.diagnostics import RUN_RECORD_COLUMNS, rms_error
from src.services.harness import (
    InstabilityError,
    SimulationRunner,
    bisect_max_dt,
    cfl_scan,
    common_interval,
    conservation_driver,
    convergence_driver,
    fine_region_mask,
    is_stable,
    make_runner,
    perf_driver,
    reference_speed,
    run_scenario,
    steps_for,
)
from src.services.lts import Region


class TestScenario:
    def test_base_scenario_is_labelled(self, make_scenario):
        scenario = make_scenario()
        assert scenario.labels is not None
        assert scenario.fine_mask.sum() == scenario.labels.fine_cells.size
        assert scenario.labels.cells_in(Region.IF1).size > 0
        assert scenario.state0.h.max() == pytest.approx(101.0, abs=0.05)

    def test_global_scheme_needs_no_fine_region(self, make_scenario):
        scenario = make_scenario(scheme="FBRK32", fineRegion=None)
        assert scenario.labels is None

    def test_deep_fine_region_keeps_surface_flat(self, make_scenario):
        scenario = make_scenario(initialCondition={"amplitude": 0.0, "fineDepth": 400.0})
        mesh, h = scenario.mesh, scenario.state0.h
        np.testing.assert_allclose(h + mesh.bottomElevation, 100.0)
        assert np.all(h[scenario.fine_mask] == 400.0)

    def test_band_mask(self, hex_mesh, make_scenario):
        spec = make_scenario().config.fineRegion.model_copy(
            update={"kind": "band", "xMin": 20000.0, "xMax": 40000.0}
        )
        mask = fine_region_mask(hex_mesh, spec)
        np.testing.assert_array_equal(mask, (hex_mesh.xCell >= 20000.0) & (hex_mesh.xCell <= 40000.0))

    def test_reference_speed_is_linear_wave_speed(self, make_scenario):
        assert reference_speed(make_scenario()) == pytest.approx(np.sqrt(9.80665 / 100.0))


class TestRunner:
    def test_steps_for(self, caplog):
        assert steps_for(400.0, 40.0) == 10
        with caplog.at_level(logging.WARNING):
            assert steps_for(100.0, 30.0) == 4
        assert "not a multiple" in caplog.text

    def test_lts_needs_labels(self, make_scenario):
        scenario = make_scenario()
        with pytest.raises(ValueError):
            SimulationRunner(scenario.mesh, Scheme.FBLTS, scenario.config.timeStepping)

    def test_fluid_at_rest_stays_at_rest(self, make_scenario):
        scenario = make_scenario(initialCondition={"amplitude": 0.0})
        result = make_runner(scenario, Scheme.FBLTS).run(scenario.state0, 5)
        np.testing.assert_allclose(result.state.h, 100.0, rtol=0, atol=1e-10)
        np.testing.assert_allclose(result.state.u, 0.0, atol=1e-12)
        assert len(result.record) == 6
        assert result.record.rows[-1].time == pytest.approx(200.0)

    def test_velocity_limit_aborts(self, make_scenario):
        scenario = make_scenario(scheme="FBRK32", fineRegion=None)
        runner = make_runner(scenario, Scheme.FBRK32, velocity_limit=1e-9)
        with pytest.raises(InstabilityError):
            runner.run(scenario.state0, 3)

    def test_split_run_charges_one_freeze_per_step(self, make_scenario):
        scenario = make_scenario(splitting=True)
        result = make_runner(scenario, Scheme.FBLTS).run(scenario.state0, 2)
        assert result.record.rows[1].slow_edge_evals == scenario.mesh.nEdges
        assert result.record.rows[0].slow_edge_evals == 0

    def test_split_run_tracks_unsplit_run_with_drag(self, make_scenario):
        physics = {"rotationOn": False, "advectionOn": False, "dragCoefficient": 2.5e-3}
        finals = []
        for splitting in (False, True):
            scenario = make_scenario(physics=physics, splitting=splitting, runLength=3600.0)
            finals.append(make_runner(scenario, Scheme.FBLTS).run(scenario.state0, 90).state)
        amplitude = 1.0
        assert rms_error(finals[1].h, finals[0].h) <= 0.01 * amplitude
        assert np.abs(finals[1].u - finals[0].u).max() > 0

    def test_run_scenario_writes_outputs(self, make_scenario, tmp_path):
        scenario = make_scenario(runLength=120.0)
        result = run_scenario(scenario, tmp_path)
        assert result.steps == 3

        record = pd.read_csv(tmp_path / "record.csv")
        assert tuple(record.columns) == RUN_RECORD_COLUMNS
        assert len(record) == 4
        state = pd.read_csv(tmp_path / "state_final.csv")
        assert tuple(state.columns) == STATE_COLUMNS
        assert set(state["region"]) >= {int(Region.IF1), int(Region.COARSE_INT)}
        resolved = yaml.safe_load((tmp_path / "config_resolved.yaml").read_text())
        assert resolved["scheme"] == "FBLTS"
        assert resolved["timeStepping"]["M"] == 4


class TestConservationDriver:
    def test_lts_drifts_stay_at_roundoff(self, make_scenario):
        report = conservation_driver(make_scenario(), 50)
        assert report.steps == 50
        assert report.mass_drift <= 1e-12
        assert report.vorticity_drift <= 1e-12
        assert report.pv_volume_drift <= 1e-12
        assert np.isfinite(report.max_vorticity_gap)
        assert list(report.as_frame().columns) == [
            "steps", "mass_drift", "vorticity_drift", "pv_volume_drift", "max_vorticity_gap",
        ]


class TestConvergenceDriver:
    """Observed temporal order of FB-LTS against a small-step RK4 reference."""

    def test_errors_fall_at_second_order_or_better(self, make_scenario):
        table = convergence_driver(make_scenario(), dt_list=[40.0, 20.0, 10.0], reference_dt=1.0, M=4)
        assert table["stable"].all()
        assert list(table["dt"]) == [40.0, 20.0, 10.0]
        errors = table["rms_h"].to_numpy()
        assert np.all(np.diff(errors) < 0)
        assert np.isnan(table["order_h"].iloc[0])
        assert table["order_h"].iloc[-1] >= 1.5
        assert table["rms_h_if1"].iloc[-1] > 0

    def test_gravity_wave_order_is_near_two(self, make_scenario):
        scenario = make_scenario(physics={"rotationOn": False, "advectionOn": False})
        table = convergence_driver(scenario, dt_list=[40.0, 20.0, 10.0, 5.0], reference_dt=0.5, M=4)
        assert table["stable"].all()
        finest = table.iloc[-1]
        assert 1.8 <= finest["order_h"] <= 2.2
        assert 1.8 <= finest["order_u"] <= 2.2
        assert 1.8 <= finest["order_h_if1"] <= 2.2
        assert 1.8 <= finest["order_u_if1"] <= 2.2

    def test_reference_dt_too_large(self, make_scenario):
        with pytest.raises(ValueError):
            convergence_driver(make_scenario(), dt_list=[40.0, 20.0], reference_dt=5.0)


class TestCflScan:
    def test_bisection_on_a_known_threshold(self):
        lo, hi, trials = bisect_max_dt(lambda dt: dt <= 37.0, 10.0, relative_width=0.01)
        assert lo <= 37.0 < hi
        assert (hi - lo) / lo <= 0.01
        assert trials > 3

    def test_bisection_starting_above_threshold(self):
        lo, hi, _ = bisect_max_dt(lambda dt: dt <= 37.0, 100.0)
        assert lo <= 37.0 < hi

    def test_bisection_without_stable_point(self):
        with pytest.raises(RuntimeError):
            bisect_max_dt(lambda dt: False, 1.0, max_expansions=10)

    def test_blow_up_counts_as_unstable(self, make_scenario):
        scenario = make_scenario(scheme="FBRK32", fineRegion=None)
        assert is_stable(scenario, Scheme.FBRK32, 10.0, 5, 10.0)
        assert not is_stable(scenario, Scheme.FBRK32, 2000.0, 20, 10.0)

    def test_forward_backward_weights_extend_the_limit(self, make_scenario):
        scenario = make_scenario(
            mesh={"nx": 8, "ny": 8},
            scheme="FBRK32",
            physics={"rotationOn": False, "advectionOn": False},
            fineRegion=None,
            cflScan={"dtStart": 10.0, "testSteps": 100},
        )
        table = cfl_scan(scenario)
        limits = dict(zip(table["scheme"], table["max_stable_dt"]))
        assert limits["FBRK32"] >= limits["RK32"] >= 10.0
        assert (table["unstable_dt"] > table["max_stable_dt"]).all()


class TestPerfDriver:
    def test_common_interval(self):
        assert common_interval(40.0, 10.0, 40.0) == 40.0
        assert common_interval(30.0, 20.0) == 60.0
        assert common_interval(0.5, 0.75) == 1.5

    def test_measured_counts_match_the_model(self, make_scenario):
        scenario = make_scenario(perf={"rk4Dt": 40.0, "fbrk32Dt": 10.0, "fbltsDt": 40.0})
        table = perf_driver(scenario)
        assert list(table["scheme"]) == ["RK4", "FBRK32", "FBLTS"]
        assert list(table["steps"]) == [1, 4, 1]
        assert table["counts_match"].all()
        lts = table.set_index("scheme").loc["FBLTS"]
        fbrk = table.set_index("scheme").loc["FBRK32"]
        assert lts["fast_cell_evals"] < fbrk["fast_cell_evals"]

    def test_needs_perf_section(self, make_scenario):
        with pytest.raises(ValueError):
            perf_driver(make_scenario())
