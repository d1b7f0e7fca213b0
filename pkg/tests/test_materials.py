"""Constitutive model: frozen fraction, modulus, programming, recovery."""

import math

import numpy as np
import pytest

from avfsim.errors import DomainError, OverstrainError, ProtocolError
from avfsim.materials import (
    MaterialParams,
    blocked_recovery_force,
    frozen_fraction,
    modulus,
    program,
    release_ratio,
    retained_strain,
)


def mat(E_g=300.0, E_r=3.0, T_sw=38.1, w=2.0, R_f=0.97, R_r=0.99, eps_max=4.0):
    return MaterialParams(
        name="test", E_glassy=E_g, E_rubbery=E_r, T_sw=T_sw, w=w,
        R_f=R_f, R_r=R_r, eps_max=eps_max,
    )


class TestFrozenFraction:
    def test_midpoint(self):
        assert frozen_fraction(38.1, mat()) == pytest.approx(0.5, abs=1e-12)

    def test_cold_side(self):
        # oracle: direct evaluation of 1/(1 + e^-10)
        expected = 1.0 / (1.0 + math.exp(-10.0))
        assert frozen_fraction(18.1, mat()) == pytest.approx(expected, abs=1e-15)
        assert frozen_fraction(18.1, mat()) == pytest.approx(0.9999546, abs=1e-6)

    def test_hot_side(self):
        assert frozen_fraction(58.1, mat()) == pytest.approx(4.54e-5, abs=1e-7)

    def test_strictly_decreasing(self):
        p = mat()
        ts = np.linspace(p.T_sw - 10 * p.w, p.T_sw + 10 * p.w, 2000)
        vals = [frozen_fraction(t, p) for t in ts]
        assert all(a > b for a, b in zip(vals, vals[1:]))

    def test_total_function_extremes(self):
        p = mat()
        assert frozen_fraction(-1e6, p) == 1.0
        assert frozen_fraction(1e6, p) == 0.0


class TestModulus:
    def test_midpoint_average(self):
        p = mat()
        assert modulus(p.T_sw, p) == pytest.approx((p.E_glassy + p.E_rubbery) / 2)

    def test_cold_approaches_glassy(self):
        p = mat(E_g=300.0, E_r=3.0)
        assert modulus(p.T_sw - 10 * p.w, p) == pytest.approx(299.99, abs=0.01)

    def test_degenerate_equal_moduli(self):
        p = mat(E_g=5.0, E_r=5.0)
        for T in (0.0, 38.1, 90.0):
            assert modulus(T, p) == 5.0

    def test_bounded_and_endpoint_approach(self):
        p = mat()
        ts = np.linspace(p.T_sw - 10 * p.w, p.T_sw + 10 * p.w, 500)
        for t in ts:
            assert p.E_rubbery <= modulus(t, p) <= p.E_glassy
        assert modulus(p.T_sw - 10 * p.w, p) == pytest.approx(p.E_glassy, rel=1e-3)
        # the rubbery endpoint needs a wider margin at 100x contrast: the
        # residual glassy fraction is weighted by E_glassy - E_rubbery
        assert modulus(p.T_sw + 13 * p.w, p) == pytest.approx(p.E_rubbery, rel=1e-3)
        gentle = mat(E_g=300.0, E_r=30.0)
        assert modulus(gentle.T_sw + 10 * gentle.w, gentle) == pytest.approx(
            30.0, rel=1e-3
        )


class TestInvariants:
    def test_modulus_ordering_required(self):
        with pytest.raises(ValueError):
            mat(E_g=3.0, E_r=300.0)

    @pytest.mark.parametrize("kw", [
        {"w": -1.0}, {"w": 0.0}, {"R_f": 0.0}, {"R_f": 1.5},
        {"R_r": -0.1}, {"eps_max": 0.0},
    ])
    def test_bad_params_rejected(self, kw):
        with pytest.raises(ValueError):
            mat(**kw)


class TestProgram:
    def test_perfect_fixity(self):
        p = mat(R_f=1.0)
        s = program(p, 0.40, p.T_sw + 25, p.T_sw - 25)
        assert s.eps_retained_at_fix == pytest.approx(0.40)

    def test_springback(self):
        p = mat(R_f=0.97)
        s = program(p, 0.40, p.T_sw + 25, p.T_sw - 25)
        assert s.eps_retained_at_fix == pytest.approx(0.388)

    def test_overstrain(self):
        p = mat(eps_max=4.0)
        with pytest.raises(OverstrainError):
            program(p, 4.5, p.T_sw + 25, p.T_sw - 25)

    @pytest.mark.parametrize("T_hot, T_fix", [
        (38.1, 15.0),   # hot temperature inside the transition
        (80.0, 37.0),   # fix temperature inside the transition
        (15.0, 80.0),   # swapped
    ])
    def test_protocol_ordering(self, T_hot, T_fix):
        with pytest.raises(ProtocolError):
            program(mat(), 0.4, T_hot, T_fix)

    def test_phi_fix_cached(self):
        p = mat()
        s = program(p, 0.4, 80.0, 15.0)
        assert s.phi_fix == pytest.approx(frozen_fraction(15.0, p), abs=0.0)


def programmed(p, eps=0.40):
    return program(p, eps, p.T_sw + 12 * p.w, p.T_sw - 10 * p.w)


class TestRetainedStrain:
    def test_at_fix_temperature(self):
        p = mat()
        s = programmed(p)
        assert retained_strain(s.T_fix, s, p) == pytest.approx(0.388)

    def test_full_recovery_residual(self):
        p = mat()
        s = programmed(p)
        assert retained_strain(p.T_sw + 10 * p.w, s, p) == pytest.approx(0.004, abs=1e-4)

    def test_half_release_point(self):
        # T where phi(T)/phi_fix = 1/2, by inverting the logistic
        p = mat()
        s = programmed(p)
        phi_t = 0.5 * s.phi_fix
        T_half = p.T_sw + p.w * math.log((1 - phi_t) / phi_t)
        assert retained_strain(T_half, s, p) == pytest.approx(0.196, abs=1e-9)

    def test_monotone_non_increasing(self):
        p = mat()
        s = programmed(p)
        ts = np.linspace(s.T_fix, p.T_sw + 10 * p.w, 3000)
        vals = [retained_strain(t, s, p) for t in ts]
        assert all(a >= b - 1e-15 for a, b in zip(vals, vals[1:]))

    def test_below_fix_raises(self):
        p = mat()
        s = programmed(p)
        with pytest.raises(DomainError):
            retained_strain(s.T_fix - 1.0, s, p)

    def test_cycle_round_trip_residual(self):
        # program then recover far above the transition: only the
        # permanent residual (1 - R_r) * eps_prog remains
        p = mat()
        s = programmed(p)
        res = retained_strain(p.T_sw + 15 * p.w, s, p)
        assert res == pytest.approx((1 - p.R_r) * 0.40, abs=1e-6)

    def test_degenerate_perfect_material(self):
        p = mat(R_f=1.0, R_r=1.0)
        s = programmed(p)
        assert s.eps_retained_at_fix == pytest.approx(0.40)
        assert retained_strain(p.T_sw + 15 * p.w, s, p) == pytest.approx(0.0, abs=1e-6)


class TestReleaseRatio:
    def test_zero_at_fix(self):
        p = mat()
        s = programmed(p)
        assert release_ratio(s.T_fix, s, p) == 0.0

    def test_half_at_switch(self):
        p = mat()
        s = programmed(p)
        assert release_ratio(p.T_sw, s, p) == pytest.approx(0.5, abs=1e-3)

    def test_one_when_recovered(self):
        p = mat()
        s = programmed(p)
        assert release_ratio(p.T_sw + 10 * p.w, s, p) == pytest.approx(1.0, abs=1e-4)

    def test_monotone_non_decreasing(self):
        p = mat()
        s = programmed(p)
        ts = np.linspace(s.T_fix, p.T_sw + 12 * p.w, 2000)
        vals = [release_ratio(t, s, p) for t in ts]
        assert all(b >= a - 1e-15 for a, b in zip(vals, vals[1:]))


class TestBlockedRecoveryForce:
    def test_zero_at_fix(self):
        p = mat()
        s = programmed(p)
        assert blocked_recovery_force(s.T_fix, s, p, 0.36) == pytest.approx(0.0, abs=1e-12)

    def test_plateau_value(self):
        # oracle: plateau formula E_r * A * (R_f - (1 - R_r)) * eps_prog
        p = mat(E_g=500.0, E_r=5.0)
        s = programmed(p)
        expected = 5.0 * 0.36 * (0.97 - 0.01) * 0.40
        assert expected == pytest.approx(0.6912)
        got = blocked_recovery_force(p.T_sw + 10 * p.w, s, p, 0.36)
        assert got == pytest.approx(expected, rel=0.01)

    def test_plateau_flatness(self):
        # < 1% relative change per degC once the transition has passed;
        # high modulus contrast pushes the flat region a few widths out
        p = mat(E_g=500.0, E_r=5.0)
        s = programmed(p)
        for T in np.arange(p.T_sw + 9 * p.w, p.T_sw + 15 * p.w, 1.0):
            f0 = blocked_recovery_force(T, s, p, 0.36)
            f1 = blocked_recovery_force(T + 1.0, s, p, 0.36)
            assert abs(f1 - f0) / f0 < 0.01
        gentle = mat(E_g=10.0, E_r=5.0)
        s = programmed(gentle)
        for T in np.arange(gentle.T_sw + 5 * gentle.w, gentle.T_sw + 12 * gentle.w, 1.0):
            f0 = blocked_recovery_force(T, s, gentle, 0.36)
            f1 = blocked_recovery_force(T + 1.0, s, gentle, 0.36)
            assert abs(f1 - f0) / f0 < 0.01

    def test_non_negative_everywhere(self):
        p = mat()
        s = programmed(p)
        ts = np.linspace(s.T_fix, p.T_sw + 12 * p.w, 10_000)
        assert all(blocked_recovery_force(t, s, p, 0.36) >= 0.0 for t in ts)

    def test_monotone_rise_gentle_contrast(self):
        # dense-grid oracle; monotone growth holds for modest
        # glassy/rubbery contrast (E_g/E_r <= ~3), the regime the
        # rise-to-plateau force curves live in
        p = mat(E_g=10.0, E_r=5.0)
        s = programmed(p)
        ts = np.linspace(s.T_fix, p.T_sw + 10 * p.w, 10_000)
        vals = [blocked_recovery_force(t, s, p, 0.36) for t in ts]
        assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))
        assert blocked_recovery_force(p.T_sw, s, p, 0.36) < blocked_recovery_force(
            p.T_sw + 5 * p.w, s, p, 0.36
        )

    def test_bad_area(self):
        p = mat()
        s = programmed(p)
        with pytest.raises(ValueError):
            blocked_recovery_force(50.0, s, p, 0.0)
