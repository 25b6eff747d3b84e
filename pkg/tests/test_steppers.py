import math

import numpy as np
import pytest

from src.dtos.physics_dtos import PhysicsConfig
from src.dtos.stepping_dtos import FBWeights
from src.services.diagnostics import VorticityFluxRecorder
from src.services.errors import PositivityError
from src.services.operators import FullTendencySource, RowSelection, State, TriskOperators, WorkCounters
from src.services.steppers import StepContext, check_positive, courant_number, fbrk32_stages, fbrk32_step, rk4_step


class LinearSource:
    """
    dh/dt = a*h + b*u, du/dt = c*h + d*u + forcing on every row: a scalar
    system dressed up as a tendency source.
    """

    def __init__(self, a=0.0, b=0.0, c=0.0, d=0.0, forcing=0.0, size=1):
        self.a, self.b, self.c, self.d, self.forcing = a, b, c, d, forcing
        self.size = size
        self.counters = WorkCounters()

    @property
    def n_cells(self):
        return self.size

    @property
    def n_edges(self):
        return self.size

    def thickness(self, u, h, cells=None):
        return self.a * h + self.b * u

    def momentum(self, u, h, edges=None):
        return self.c * h + self.d * u + self.forcing

    def vorticity_flux(self, u, h):
        return np.zeros(self.size)


def scalar_state(h, u=0.0):
    return State(h=np.array([h]), u=np.array([u]))


class TestFBRK32:
    """
    The global forward-backward step on scalar surrogates and on the mesh.
    """

    def test_constant_forcing(self):
        ctx = StepContext(dt=0.5, source=LinearSource(forcing=2.0))
        out = fbrk32_step(scalar_state(3.0, 1.0), ctx)
        assert out.h[0] == 3.0
        assert out.u[0] == pytest.approx(2.0)
        assert out.t == 0.5

    def test_exponential_decay_is_third_order_on_decoupled_thickness(self):
        tau = 0.1
        out = fbrk32_step(scalar_state(1.0), StepContext(dt=tau, source=LinearSource(a=-1.0)))
        assert out.h[0] == pytest.approx(1 - tau + tau**2 / 2 - tau**3 / 6, rel=1e-15)

    def test_oscillator_stage_arithmetic(self):
        # u' = -h, h' = u with (u, h) = (0, 1)
        dt, w = 0.1, FBWeights()
        out = fbrk32_stages(scalar_state(1.0, 0.0), StepContext(dt=dt, source=LinearSource(b=1.0, c=-1.0)))

        h0, u0 = 1.0, 0.0
        h1 = h0 + dt / 3.0 * u0
        hs = w.beta1 * h1 + (1.0 - w.beta1) * h0
        u1 = u0 + dt / 3.0 * (-hs)
        h2 = h0 + dt / 2.0 * u1
        hss = w.beta2 * h2 + (1.0 - w.beta2) * h0
        u2 = u0 + dt / 2.0 * (-hss)
        h3 = h0 + dt * u2
        hsss = w.beta3 * h3 + (1.0 - 2.0 * w.beta3) * h2 + w.beta3 * h0
        u3 = u0 + dt * (-hsss)

        for got, want in [(out.h1, h1), (out.u1, u1), (out.h2, h2), (out.u2, u2), (out.h3, h3), (out.u3, u3)]:
            assert got[0] == pytest.approx(want, abs=1e-15)

    def test_zero_weights_is_plain_rk32(self):
        dt = 0.1
        out = fbrk32_stages(scalar_state(1.0, 0.0), StepContext(dt=dt, source=LinearSource(b=1.0, c=-1.0), weights=FBWeights.zero()))
        # momentum stages read the thickness at the start of the step
        assert out.u1[0] == pytest.approx(-dt / 3.0)
        assert out.u2[0] == pytest.approx(-dt / 2.0)
        np.testing.assert_array_equal(out.hsss, out.h2)

    def test_positivity_failure_is_tagged(self):
        ctx = StepContext(dt=1.0, source=LinearSource(a=-10.0))
        with pytest.raises(PositivityError) as info:
            fbrk32_step(scalar_state(1.0), ctx)
        assert info.value.stage == 1
        assert info.value.region == "global"

    def test_rejects_nonpositive_dt(self):
        with pytest.raises(ValueError):
            StepContext(dt=0.0, source=LinearSource())

    def test_records_vorticity_flux(self, hex_mesh, random_state):
        recorder = VorticityFluxRecorder()
        source = FullTendencySource(TriskOperators(hex_mesh, PhysicsConfig()))
        fbrk32_step(random_state, StepContext(dt=10.0, source=source, recorder=recorder))
        record = recorder.take()
        assert record.dt == 10.0
        assert record.coarse.shape == (hex_mesh.nEdges,)
        assert not record.is_lts

    def test_counts_three_stages(self, hex_mesh, random_state):
        counters = WorkCounters()
        source = FullTendencySource(TriskOperators(hex_mesh, PhysicsConfig()), counters)
        fbrk32_step(random_state, StepContext(dt=10.0, source=source))
        assert counters.fast_cell_evals == 3 * hex_mesh.nCells
        assert counters.fast_edge_evals == 3 * hex_mesh.nEdges
        assert counters.slow_edge_evals == 3 * hex_mesh.nEdges


class TestCheckPositive:
    def test_nan_thickness_is_rejected(self):
        with pytest.raises(PositivityError) as info:
            check_positive(np.array([100.0, np.nan, 100.0]), stage=1)
        assert info.value.index == 1
        assert info.value.stage == 1

    def test_restricted_rows_report_the_global_index(self):
        h = np.array([100.0, 100.0, -1.0, np.nan])
        with pytest.raises(PositivityError) as info:
            check_positive(h, stage=2, rows=RowSelection([1, 3]))
        assert info.value.index == 3
        check_positive(h, stage=2, rows=RowSelection([0, 1]))


class TestRK4:
    def test_constant_forcing(self):
        out = rk4_step(scalar_state(2.0, 1.0), StepContext(dt=0.25, source=LinearSource(forcing=4.0)))
        assert out.h[0] == 2.0
        assert out.u[0] == pytest.approx(2.0)

    def test_exponential_decay(self):
        out = rk4_step(scalar_state(1.0), StepContext(dt=0.1, source=LinearSource(a=-1.0)))
        assert out.h[0] == pytest.approx(0.9048375, abs=1e-13)
        assert abs(out.h[0] - math.exp(-0.1)) == pytest.approx(8.2e-8, rel=0.02)

    def test_gravity_wave_error_ratio(self, hex_mesh):
        """Halving dt cuts the error against a tiny-step reference by about 16."""
        source = FullTendencySource(TriskOperators(hex_mesh, PhysicsConfig.gravity_wave()))
        # a single periodic mode keeps the error in the asymptotic regime
        h0 = 100.0 + np.cos(2.0 * np.pi * hex_mesh.xCell / hex_mesh.xPeriod)
        state0 = State(h=h0, u=np.zeros(hex_mesh.nEdges))

        def run(dt, T=240.0):
            state, ctx = state0, StepContext(dt=dt, source=source)
            for _ in range(int(round(T / dt))):
                state = rk4_step(state, ctx)
            return state.h

        reference = run(2.0)
        coarse = np.abs(run(40.0) - reference).max()
        fine = np.abs(run(20.0) - reference).max()
        assert 12.0 <= coarse / fine <= 20.0


class TestCourant:
    def test_resting_deep_water(self, small_mesh):
        state = State(h=np.full(small_mesh.nCells, 100.0), u=np.zeros(small_mesh.nEdges))
        nu, edge = courant_number(state, small_mesh, dt=10.0)
        assert nu == pytest.approx(0.313156, rel=1e-5)
        assert 0 <= edge < small_mesh.nEdges
        assert courant_number(state, small_mesh, dt=20.0)[0] == pytest.approx(2 * nu, rel=1e-15)

    def test_flow_adds_to_wave_speed(self, small_mesh):
        u = np.zeros(small_mesh.nEdges)
        u[4] = -5.0
        state = State(h=np.full(small_mesh.nCells, 100.0), u=u)
        nu, edge = courant_number(state, small_mesh, dt=10.0)
        assert edge == 4
        assert nu == pytest.approx((5.0 + math.sqrt(980.665)) * 10.0 / 1000.0)
