import numpy as np
import pytest

from src.dtos.physics_dtos import PhysicsConfig
from src.services.errors import PositivityError
from src.services.mesh import build_periodic_hex_mesh, with_fields
from src.services.operators import FullTendencySource, RowSelection, State, TriskOperators, WorkCounters


@pytest.fixture
def operators(hex_mesh):
    return TriskOperators(hex_mesh, PhysicsConfig())


class TestPerpFlux:
    """
    TRiSK flux mapping: tangential reconstruction and the dual/primal
    divergence consistency that makes the vorticity budget close.
    """

    def test_uniform_flow_gives_exact_tangential_component(self, hex_mesh, operators):
        vx, vy = 1.3, -0.7
        flux = hex_mesh.surface_vector_on_edges(vx, vy)
        nx, ny = hex_mesh.edge_normals()
        np.testing.assert_allclose(operators.perp_flux(flux), -ny * vx + nx * vy, atol=1e-12)

    def test_zero_flux(self, operators, hex_mesh):
        assert not np.any(operators.perp_flux(np.zeros(hex_mesh.nEdges)))

    def test_uniform_pv_consistency(self, operators, rng):
        for _ in range(20):
            flux = rng.normal(size=operators.n_edges)
            dual = operators.curl @ operators.perp_flux(flux)
            primal = operators.kite @ (operators.div @ flux)
            scale = np.max(abs(operators.curl) @ (abs(operators.perp) @ np.abs(flux)))
            assert np.max(np.abs(dual - primal)) <= 1e-12 * scale

    def test_linearity(self, operators, rng):
        f1, f2 = rng.normal(size=(2, operators.n_edges))
        combined = operators.perp_flux(2.0 * f1 - 3.0 * f2)
        np.testing.assert_allclose(combined, 2.0 * operators.perp_flux(f1) - 3.0 * operators.perp_flux(f2), atol=1e-12)


class TestThicknessTendency:
    def test_divergence_theorem(self, hex_mesh, operators, random_state):
        dh = operators.thickness_tendency(random_state.u, random_state.h)
        weighted = hex_mesh.areaCell * dh
        assert abs(weighted.sum()) <= 1e-13 * np.abs(weighted).sum()

    def test_single_edge_flux(self, small_mesh):
        ops = TriskOperators(small_mesh)
        u = np.zeros(small_mesh.nEdges)
        u[0] = 1.0
        dh = ops.thickness_tendency(u, np.ones(small_mesh.nCells))
        # edge 0 leaves its first cell (n = +1)
        first, second = small_mesh.cellsOnEdge[0]
        flux_out = small_mesh.lEdge[0] / small_mesh.areaCell[first]
        assert dh[first] == pytest.approx(-flux_out)
        assert dh[second] == pytest.approx(flux_out)
        assert flux_out == pytest.approx(1000.0 / np.sqrt(3.0) / 8.6602540e5, rel=1e-7)

    def test_uniform_flow_has_no_divergence(self, small_mesh):
        ops = TriskOperators(small_mesh)
        u = small_mesh.surface_vector_on_edges(2.0, 1.0)
        dh = ops.thickness_tendency(u, np.full(small_mesh.nCells, 100.0))
        np.testing.assert_allclose(dh, 0.0, atol=1e-12)

    def test_restricted_rows_are_bitwise_equal(self, operators, random_state):
        rows = RowSelection(np.arange(0, operators.n_cells, 7))
        full = operators.thickness_tendency(random_state.u, random_state.h)
        part = operators.thickness_tendency(random_state.u, random_state.h, rows)
        np.testing.assert_array_equal(part, full[rows.indices])


class TestVorticityAndEnergy:
    def test_rest_state_vorticity(self, hex_mesh):
        state = State(h=np.full(hex_mesh.nCells, 100.0), u=np.zeros(hex_mesh.nEdges))
        rotating = TriskOperators(hex_mesh).vorticity_fields(state.u, state.h)
        np.testing.assert_array_equal(rotating.eta, 1e-4)
        np.testing.assert_allclose(rotating.q, 1e-6)
        still = TriskOperators(hex_mesh, PhysicsConfig(rotationOn=False)).vorticity_fields(state.u, state.h)
        assert not np.any(still.eta)

    def test_relative_vorticity_integrates_to_zero(self, hex_mesh, operators, random_state):
        zeta = operators.vorticity_fields(random_state.u, random_state.h).zeta
        weighted = hex_mesh.areaDual * zeta
        assert abs(weighted.sum()) <= 1e-13 * np.abs(weighted).sum()

    def test_vorticity_flux_divergence_integrates_to_zero(self, hex_mesh, operators, random_state):
        flux = operators.vorticity_flux(random_state.u, random_state.h)
        weighted = hex_mesh.areaDual * operators.vorticity_tendency_from_flux(flux)
        assert abs(weighted.sum()) <= 1e-13 * np.abs(weighted).sum()

    def test_kinetic_energy_of_uniform_flow(self, hex_mesh, operators):
        u = hex_mesh.surface_vector_on_edges(0.6, 0.8)
        K = operators.kinetic_energy(u)
        np.testing.assert_allclose(K, 0.5, rtol=0.02)
        np.testing.assert_allclose(operators.kinetic_energy(2.0 * u), 4.0 * K, rtol=1e-15)

    def test_negative_dual_thickness_raises(self, operators, hex_mesh):
        h = np.full(hex_mesh.nCells, 100.0)
        h[0] = -400.0
        with pytest.raises(PositivityError):
            operators.vorticity_fields(np.zeros(hex_mesh.nEdges), h)


class TestMomentum:
    def test_lake_at_rest(self, hex_mesh, rng):
        bottom = rng.uniform(-5.0, 5.0, hex_mesh.nCells)
        mesh = with_fields(hex_mesh, bottomElevation=bottom)
        ops = TriskOperators(mesh)
        state = State(h=100.0 - bottom, u=np.zeros(mesh.nEdges))
        full = ops.tendency_full(state)
        np.testing.assert_allclose(full.du, 0.0, atol=1e-12)
        assert not np.any(full.dh)

    def test_pressure_gradient_on_one_edge(self):
        mesh = build_periodic_hex_mesh(4, 4, 1000.0)
        ops = TriskOperators(mesh)
        h = np.full(mesh.nCells, 100.0)
        first, second = mesh.cellsOnEdge[0]
        h[first] = 100.1
        du = ops.gradient_momentum(h)
        assert du[0] == pytest.approx(9.80665e-4, rel=1e-9)
        h[first], h[second] = 100.0, 100.1
        assert ops.gradient_momentum(h)[0] == pytest.approx(-9.80665e-4, rel=1e-9)

    def test_coriolis_term_matches_assembled_operator(self, hex_mesh):
        h = np.full(hex_mesh.nCells, 100.0)
        u = hex_mesh.surface_vector_on_edges(0.3, 0.1)
        ops = TriskOperators(hex_mesh, PhysicsConfig(advectionOn=False))
        q = 1e-4 / 100.0
        expected = q * (ops.perp.toarray() @ (100.0 * u))
        np.testing.assert_allclose(ops.slow_momentum(u, h), expected, rtol=1e-12, atol=1e-18)

    def test_full_is_fast_plus_slow(self, operators, random_state):
        fast = operators.tendency_fast(random_state)
        slow = operators.tendency_slow(random_state)
        full = operators.tendency_full(random_state)
        np.testing.assert_array_equal(full.du, fast.du + slow.du)
        np.testing.assert_array_equal(full.dh, fast.dh + slow.dh)

    def test_gravity_wave_full_equals_fast(self, hex_mesh, random_state):
        ops = TriskOperators(hex_mesh, PhysicsConfig.gravity_wave())
        np.testing.assert_array_equal(ops.tendency_full(random_state).du, ops.tendency_fast(random_state).du)

    def test_drag_opposes_flow(self, hex_mesh):
        ops = TriskOperators(hex_mesh, PhysicsConfig(rotationOn=False, advectionOn=False, dragCoefficient=2.5e-3))
        u = hex_mesh.surface_vector_on_edges(1.0, 0.0)
        du = ops.slow_momentum(u, np.full(hex_mesh.nCells, 10.0))
        moving = np.abs(u) > 1e-12
        assert np.all(du[moving] * u[moving] < 0)


class TestWorkCounters:
    def test_one_call_charges_every_row(self, small_mesh):
        counters = WorkCounters()
        source = FullTendencySource(TriskOperators(small_mesh, PhysicsConfig.gravity_wave()), counters)
        state = State(h=np.ones(16), u=np.zeros(48))
        source.thickness(state.u, state.h)
        source.momentum(state.u, state.h)
        assert counters.as_dict() == {
            "fast_cell_evals": 16, "fast_edge_evals": 48, "slow_cell_evals": 0, "slow_edge_evals": 0,
        }

    def test_restricted_call_charges_selected_rows(self, small_mesh):
        counters = WorkCounters()
        source = FullTendencySource(TriskOperators(small_mesh), counters)
        rows = RowSelection([0, 5, 9])
        source.momentum(np.zeros(48), np.ones(16), rows)
        assert counters.fast_edge_evals == 3
        assert counters.slow_edge_evals == 3
