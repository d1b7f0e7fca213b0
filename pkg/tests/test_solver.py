"""Single-step equilibration, ramp continuation, event detection."""

import math

import numpy as np
import pytest
from scipy.optimize import brentq

from avfsim import presets
from avfsim._kernels import available_backends
from avfsim.errors import ConvergenceError
from avfsim.mechanics import (
    DemonstratorConfig,
    LayoutKind,
    build_assembly,
    double_well_energy,
    double_well_grad,
    lobe_energy,
    strand_energy,
)
from avfsim.solver import (
    EVENT_NONE,
    EVENT_SNAP_CLOSE,
    MotionTrace,
    SolverSettings,
    ThermalProtocol,
    detect_events,
    equilibrate_step,
    fold_threshold,
    run_ramp,
)


def well(k, m):
    """Double-well context with analytic gradient."""

    def energy(q, T):
        return double_well_energy(q, k, m)

    def grad(q, T):
        return double_well_grad(q, k, m)

    return energy, grad


class TestThermalProtocol:
    def test_default_grid_row_count(self):
        assert len(ThermalProtocol().temperatures()) == 1001

    def test_grid_endpoints(self):
        ts = ThermalProtocol().temperatures()
        assert ts[0] == 20.0
        assert ts[-1] == pytest.approx(70.0, abs=1e-9)

    def test_time_mapping(self):
        proto = ThermalProtocol()
        assert proto.time_of(70.0) == pytest.approx(3000.0)

    @pytest.mark.parametrize("kw", [
        {"T_end": 10.0}, {"rate": 0.0}, {"dT_step": 0.0}, {"dT_step": 2.0},
    ])
    def test_invalid(self, kw):
        with pytest.raises(ValueError):
            ThermalProtocol(**kw)


class TestEquilibrateStep:
    def test_symmetric_stays_put(self):
        energy, grad = well(1.0, 0.0)
        q, snapped = equilibrate_step(-1.0, 25.0, energy, SolverSettings(), grad)
        assert q == pytest.approx(-1.0, abs=1e-9)
        assert not snapped

    def test_subcritical_tracks_left_root(self):
        # oracle: left root of 4q(q^2-1) = 1 via bracketed root finding
        energy, grad = well(1.0, 1.0)
        q_oracle = brentq(lambda q: 4 * q * (q * q - 1) - 1.0, -1.2, -1.0 / math.sqrt(3))
        q, snapped = equilibrate_step(-1.0, 25.0, energy, SolverSettings(), grad)
        assert not snapped
        assert -1.0 < q < -1.0 / math.sqrt(3)
        assert q == pytest.approx(q_oracle, abs=1e-8)

    def test_supercritical_snaps_to_global_minimum(self):
        # oracle: brute-force scan of (q^2-1)^2 - 2q
        energy, grad = well(1.0, 2.0)
        qs = np.linspace(-1.5, 1.5, 200_001)
        v = (qs**2 - 1.0) ** 2 - 2.0 * qs
        q_oracle = qs[np.argmin(v)]
        q, snapped = equilibrate_step(-1.0, 25.0, energy, SolverSettings(), grad)
        assert snapped
        assert q == pytest.approx(q_oracle, abs=1e-4)
        assert q == pytest.approx(1.19, abs=0.01)

    def test_residual_below_tolerance(self):
        s = SolverSettings()
        for m in (0.0, 0.7, 1.2, 2.5):
            energy, grad = well(1.0, m)
            q, _ = equilibrate_step(-1.0, 25.0, energy, s, grad)
            assert abs(grad(q, 25.0)) < s.grad_tol

    def test_numeric_gradient_fallback(self):
        energy, _ = well(1.0, 1.0)
        q, snapped = equilibrate_step(-1.0, 25.0, energy, SolverSettings())
        assert not snapped
        assert q == pytest.approx(-0.8376, abs=1e-3)

    def test_flip_exactly_at_fold_threshold(self):
        s = SolverSettings()
        m_star = fold_threshold(1.0)
        for m, expect in ((m_star * 0.999, False), (m_star * 1.001, True)):
            energy, grad = well(1.0, m)
            _, snapped = equilibrate_step(-1.0, 25.0, energy, s, grad)
            assert snapped is expect

    def test_convergence_error_budget(self):
        def nasty(q, T):
            return abs(q) ** 0.5  # gradient singular at the minimum

        with pytest.raises(ConvergenceError):
            equilibrate_step(0.9, 25.0, nasty, SolverSettings(max_iter=3))


def l20_mono():
    return build_assembly(DemonstratorConfig(lobe_material=presets.material("L20")))


def sme25_mono():
    return build_assembly(DemonstratorConfig(lobe_material=presets.material("SME25")))


def bidir_single():
    return build_assembly(
        DemonstratorConfig(
            lobe_material=presets.material("L20"),
            layout=LayoutKind.SINGLE_STRAND,
            strand_material=presets.strand_material_for(presets.material("SME25")),
        )
    )


class TestRunRamp:
    def test_row_count_and_invariants(self):
        trace = run_ramp(l20_mono(), ThermalProtocol())
        assert len(trace) == 1001
        trace.validate()
        assert np.all(np.diff(trace.temp_C) > 0)
        np.testing.assert_allclose(
            trace.time_s, (trace.temp_C - 20.0) / 1.0 * 60.0, atol=1e-9
        )

    def test_determinism_bitwise(self):
        t1 = run_ramp(l20_mono(), ThermalProtocol())
        t2 = run_ramp(l20_mono(), ThermalProtocol())
        assert np.array_equal(t1.q_left, t2.q_left)
        assert np.array_equal(t1.x_right_mm, t2.x_right_mm)
        assert t1.event == t2.event

    @pytest.mark.skipif(
        len(available_backends()) < 2, reason="compiled kernel not built"
    )
    def test_backends_bit_identical(self):
        for asm in (l20_mono(), sme25_mono(), bidir_single()):
            t_cy = run_ramp(asm, ThermalProtocol(), backend="cython")
            t_py = run_ramp(asm, ThermalProtocol(), backend="python")
            assert np.array_equal(t_cy.q_left, t_py.q_left)
            assert np.array_equal(t_cy.q_right, t_py.q_right)
            assert t_cy.event == t_py.event

    def test_equilibrium_residual_full_trace(self):
        # every accepted coordinate is a stationary point of the full
        # per-lobe potential (lobe + strands), checked independently of
        # the kernel's coefficient pipeline
        asm = bidir_single()
        trace = run_ramp(asm, ThermalProtocol())
        h = 1e-6
        for i in range(0, len(trace), 97):
            T = trace.temp_C[i]
            q = trace.q_left[i]

            def V(qq):
                return lobe_energy(qq, T, asm.left) + sum(
                    strand_energy(qq, T, s) for s in asm.layout.strands
                )

            g = (V(q + h) - V(q - h)) / (2 * h)
            assert abs(g) < 5e-5  # finite-difference floor

    def test_smooth_steps_small(self):
        trace = run_ramp(l20_mono(), ThermalProtocol())
        dq = np.abs(np.diff(trace.q_left))
        assert trace.event.count(EVENT_NONE) == len(trace)
        assert dq.max() < 0.1

    def test_snap_releases_energy(self):
        asm = sme25_mono()
        trace = run_ramp(asm, ThermalProtocol())
        rows = [i for i, e in enumerate(trace.event) if e == EVENT_SNAP_CLOSE]
        assert rows
        i = rows[0]
        T = trace.temp_C[i]
        v_before = lobe_energy(trace.q_left[i - 1], T, asm.left)
        v_after = lobe_energy(trace.q_left[i], T, asm.left)
        assert v_after < v_before

    def test_step_halving_stability(self):
        asm = sme25_mono()
        t1 = run_ramp(asm, ThermalProtocol())
        t2 = run_ramp(asm, ThermalProtocol(dT_step=0.025))
        r1 = detect_events(t1, asm)
        r2 = detect_events(t2, asm)
        assert abs(r1.snap_events[0].temp_C - r2.snap_events[0].temp_C) < 0.1
        assert abs(r1.closure_temp - r2.closure_temp) < 0.1


def synthetic_trace(x_vals, x_open=10.0, dt=3.0, events=None):
    n = len(x_vals)
    x = np.asarray(x_vals, dtype=float)
    return MotionTrace(
        time_s=np.arange(n) * dt,
        temp_C=20.0 + 0.05 * np.arange(n),
        q_left=1.0 - 2.0 * x / x_open,
        q_right=1.0 - 2.0 * x / x_open,
        x_left_mm=x.copy(),
        x_right_mm=x.copy(),
        event=events or [EVENT_NONE] * n,
        x_open=x_open,
    )


class TestDetectEvents:
    def test_never_closing(self):
        trace = synthetic_trace(np.linspace(10.0, 8.0, 50))
        rep = detect_events(trace, None)
        assert rep.closure_temp is None
        assert not rep.closed

    def test_single_row_jump_is_one_snap(self):
        x = [10.0] * 10 + [5.0] * 10  # 0.5 x_open in one row
        rep = detect_events(synthetic_trace(x), None)
        assert len(rep.snap_events) == 1
        assert rep.snap_events[0].kind == EVENT_SNAP_CLOSE
        assert rep.snap_events[0].row == 10

    def test_smooth_drop_is_no_snap(self):
        x = np.linspace(10.0, 0.2, 200)
        rep = detect_events(synthetic_trace(x), None)
        assert rep.snap_events == ()
        assert rep.closed

    def test_closure_and_reopening_temps(self):
        x = np.concatenate([np.linspace(10.0, 0.1, 100), np.linspace(0.1, 6.0, 100)])
        rep = detect_events(synthetic_trace(x), None)
        assert rep.closed and rep.reopened
        assert rep.closure_temp < rep.reopening_onset_temp

    def test_events_copied_from_trace(self):
        ev = [EVENT_NONE] * 20
        ev[7] = EVENT_SNAP_CLOSE
        rep = detect_events(synthetic_trace([10.0] * 20, events=ev), None)
        assert [e.row for e in rep.snap_events] == [7]

    def test_final_positions_relative(self):
        x = np.linspace(10.0, 4.0, 30)
        rep = detect_events(synthetic_trace(x), None)
        assert rep.final_x_rel[0] == pytest.approx(0.4)


class TestFoldThreshold:
    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            fold_threshold(-1.0)
