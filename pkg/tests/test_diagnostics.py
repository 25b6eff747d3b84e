import numpy as np
import pytest

from src.services.diagnostics import (
    RunRecord,
    RunRecordRow,
    VorticityFluxRecord,
    VorticityFluxRecorder,
    dual_thickness,
    relative_drift,
    rms_error,
    speedup,
    step_prognostic_vorticity,
    total_absolute_vorticity,
    total_mass,
    total_pv_volume,
)
from src.services.errors import InternalConsistencyError, PositivityError
from src.services.lts import label_regions
from src.services.operators import State, TriskOperators


@pytest.fixture
def rest_state(small_mesh):
    return State(h=np.full(small_mesh.nCells, 100.0), u=np.zeros(small_mesh.nEdges))


class TestIntegrals:
    def test_total_mass(self, small_mesh, rest_state):
        assert total_mass(rest_state, small_mesh) == pytest.approx(1.38564065e9, rel=1e-8)

    def test_total_absolute_vorticity(self, small_mesh):
        eta = np.full(small_mesh.nVertices, 1e-4)
        assert total_absolute_vorticity(eta, small_mesh) == pytest.approx(1385.64065, rel=1e-8)

    def test_pv_volume_identity(self, hex_mesh, random_state):
        eta = TriskOperators(hex_mesh).vorticity_fields(random_state.u, random_state.h).eta
        via_pv, direct = total_pv_volume(random_state, eta, hex_mesh)
        assert via_pv == pytest.approx(direct, rel=1e-13)

    def test_dual_thickness_of_uniform_layer(self, small_mesh):
        np.testing.assert_allclose(dual_thickness(np.full(small_mesh.nCells, 7.0), small_mesh), 7.0, rtol=1e-14)

    def test_dual_thickness_rejects_nonpositive(self, small_mesh):
        h = np.full(small_mesh.nCells, 1.0)
        h[3] = -10.0
        with pytest.raises(PositivityError):
            dual_thickness(h, small_mesh)


class TestErrorsAndRatios:
    def test_rms_error(self):
        assert rms_error([1.0, 2.0], [1.0, 4.0]) == pytest.approx(1.41421356, rel=1e-8)
        assert rms_error([], []) == 0.0

    def test_rms_length_mismatch(self):
        with pytest.raises(ValueError):
            rms_error([1.0, 2.0], [1.0, 2.0, 3.0])

    def test_speedup(self):
        assert speedup(26.07, 2.59) == pytest.approx(10.07, abs=0.005)
        assert speedup(5.86, 2.59) == pytest.approx(2.26, abs=0.005)

    @pytest.mark.parametrize("baseline, candidate", [(0.0, 1.0), (1.0, 0.0), (-1.0, 2.0)])
    def test_speedup_needs_positive_timings(self, baseline, candidate):
        with pytest.raises(ValueError):
            speedup(baseline, candidate)

    def test_relative_drift(self):
        assert relative_drift([10.0, 10.5, 9.0]) == pytest.approx(0.1)
        assert relative_drift([0.0, 1e-3, -2e-3]) == pytest.approx(2e-3)
        assert relative_drift([]) == 0.0


class TestPrognosticVorticity:
    """
    Companion absolute vorticity advanced from the recorded edge fluxes.
    """

    def test_global_step_is_conservative(self, hex_mesh, random_state):
        ops = TriskOperators(hex_mesh)
        eta = ops.vorticity_fields(random_state.u, random_state.h).eta
        flux = ops.vorticity_flux(random_state.u, random_state.h)
        out = step_prognostic_vorticity(eta, VorticityFluxRecord(dt=30.0, coarse=flux), ops)
        before = total_absolute_vorticity(eta, hex_mesh)
        after = total_absolute_vorticity(out, hex_mesh)
        assert after == pytest.approx(before, rel=1e-13)
        assert np.abs(out - eta).max() > 0

    def test_single_edge_flux_moves_vorticity_between_two_dual_cells(self, small_mesh):
        ops = TriskOperators(small_mesh)
        flux = np.zeros(small_mesh.nEdges)
        flux[4] = 1.0
        eta = np.zeros(small_mesh.nVertices)
        out = step_prognostic_vorticity(eta, VorticityFluxRecord(dt=1.0, coarse=flux), ops)
        changed = np.flatnonzero(out)
        assert set(changed.tolist()) == set(small_mesh.verticesOnEdge[4].tolist())
        assert np.dot(small_mesh.areaDual, out) == pytest.approx(0.0, abs=1e-12)

    def test_zero_flux_leaves_eta_unchanged(self, small_mesh):
        ops = TriskOperators(small_mesh)
        eta = np.linspace(1e-4, 2e-4, small_mesh.nVertices)
        record = VorticityFluxRecord(dt=10.0, coarse=np.zeros(small_mesh.nEdges))
        np.testing.assert_array_equal(step_prognostic_vorticity(eta, record, ops), eta)

    def test_lts_record_with_equal_fluxes_matches_global(self, hex_mesh, random_state):
        ops = TriskOperators(hex_mesh)
        d = np.hypot(hex_mesh.xCell - hex_mesh.xPeriod / 2, hex_mesh.yCell - hex_mesh.yPeriod / 2)
        labels = label_regions(hex_mesh, d <= 12000.0)
        eta = ops.vorticity_fields(random_state.u, random_state.h).eta
        flux = ops.vorticity_flux(random_state.u, random_state.h)
        lts = VorticityFluxRecord(dt=40.0, coarse=flux, subcycles=(flux,) * 4)
        assert lts.M == 4 and lts.is_lts
        out = step_prognostic_vorticity(eta, lts, ops, labels)
        glob = step_prognostic_vorticity(eta, VorticityFluxRecord(dt=40.0, coarse=flux), ops)
        np.testing.assert_allclose(out, glob, rtol=1e-12, atol=1e-18)

    def test_lts_record_needs_labels(self, small_mesh):
        ops = TriskOperators(small_mesh)
        flux = np.zeros(small_mesh.nEdges)
        record = VorticityFluxRecord(dt=1.0, coarse=flux, subcycles=(flux, flux))
        with pytest.raises(InternalConsistencyError):
            step_prognostic_vorticity(np.zeros(small_mesh.nVertices), record, ops)

    def test_recorder_hands_out_each_record_once(self):
        recorder = VorticityFluxRecorder()
        recorder.record_global(5.0, np.ones(3))
        assert recorder.take().dt == 5.0
        with pytest.raises(InternalConsistencyError):
            recorder.take()


class TestRunRecord:
    def test_totals_and_frame(self):
        record = RunRecord()
        for step in range(3):
            record.append(RunRecordRow(
                step=step, time=float(step), total_mass=1.0, total_abs_vorticity=0.0, pv_volume=0.0,
                max_courant=0.1, fast_cell_evals=step, fast_edge_evals=2 * step, slow_cell_evals=0,
                slow_edge_evals=step, wall_fine=0.5,
            ))
        totals = record.totals()
        assert totals["fast_cell_evals"] == 3
        assert totals["fast_edge_evals"] == 6
        assert totals["wall_fine"] == pytest.approx(1.5)
        assert len(record.to_frame()) == 3
