"""Lobe elements, strand actuators, assemblies."""

import math

import numpy as np
import pytest

from avfsim import presets
from avfsim.errors import ConfigError
from avfsim.mechanics import (
    DemonstratorConfig,
    LayoutKind,
    build_assembly,
    double_well_energy,
    double_well_grad,
    lobe_energy,
    stiffness_scale,
    strand_energy,
    tip_displacement,
    total_energy,
)
from avfsim.solver import fold_threshold


def mono_l20(a=60.0, b=2.0, **kw):
    return build_assembly(
        DemonstratorConfig(lobe_material=presets.material("L20"),
                           length_mm=a, thickness_mm=b, **kw)
    )


def bidir(kind=LayoutKind.DIAMOND_SHAPE, **kw):
    return build_assembly(
        DemonstratorConfig(
            lobe_material=presets.material("L20"),
            layout=kind,
            strand_material=presets.strand_material_for(presets.material("SME25")),
            **kw,
        )
    )


class TestTipDisplacement:
    def test_closed_is_reference(self):
        assert tip_displacement(1.0, mono_l20()) == 0.0

    def test_open_gap_is_sagitta(self):
        # oracle: circular-segment sagitta a^2 / (8 R1) = 3600/320
        assert mono_l20().x_open == pytest.approx(11.25)
        assert tip_displacement(-1.0, mono_l20()) == pytest.approx(11.25)

    def test_linear_midpoint(self):
        asm = mono_l20()
        assert tip_displacement(0.0, asm) == pytest.approx(asm.x_open / 2)

    def test_affine_strictly_decreasing(self):
        asm = mono_l20()
        qs = np.linspace(-1.5, 1.5, 101)
        xs = [tip_displacement(q, asm) for q in qs]
        diffs = np.diff(xs)
        assert np.all(diffs < 0)
        assert np.allclose(diffs, diffs[0])


class TestLobeEnergy:
    def test_symmetric_unbiased_at_fix(self):
        asm = mono_l20()
        T_fix = asm.left.spec.programmed.T_fix
        assert lobe_energy(-1.0, T_fix, asm.left) == pytest.approx(0.0, abs=1e-9)
        assert lobe_energy(1.0, T_fix, asm.left) == pytest.approx(0.0, abs=1e-9)

    def test_barrier_height_equals_k(self):
        asm = mono_l20()
        T_fix = asm.left.spec.programmed.T_fix
        k, h, c = asm.left.coefficients(T_fix)
        assert h == pytest.approx(0.0, abs=1e-9)
        assert lobe_energy(0.0, T_fix, asm.left) == pytest.approx(k)

    def test_release_moves_the_rest_position(self):
        asm = mono_l20()
        m = asm.left.spec.material
        _, _, c_cold = asm.left.coefficients(25.0)
        _, _, c_hot = asm.left.coefficients(m.T_sw + 10 * m.w)
        assert c_cold == pytest.approx(-1.0, abs=1e-2)
        tau = asm.left.mount_transmission
        assert c_hot == pytest.approx(-1.0 + 2.0 * tau, abs=1e-3)
        assert c_cold < c_hot

    def test_double_well_examples(self):
        assert double_well_energy(0.0, 1.0, 0.0) == pytest.approx(1.0)
        assert double_well_energy(1.0, 1.0, 1.0) == pytest.approx(-1.0)
        assert double_well_grad(-1.0, 1.0, 0.0) == pytest.approx(0.0)


class TestStiffnessScale:
    def test_reference_geometry(self):
        assert stiffness_scale(60.0, 2.0, 300.0) == pytest.approx(10.0)

    def test_cubic_thickness_scaling(self):
        k1 = stiffness_scale(60.0, 2.0, 300.0)
        k2 = stiffness_scale(60.0, 4.0, 300.0)
        assert k2 == pytest.approx(8.0 * k1, rel=1e-12)


class TestFoldThresholdOracle:
    @staticmethod
    def _critical_m_brute(k, n=100_000):
        """Scan: smallest m at which the left-basin minimum of
        k(q^2-1)^2 - mq disappears on a dense grid."""
        qs = np.linspace(-1.5, 1.5, n)

        def has_left_min(m):
            v = k * (qs**2 - 1.0) ** 2 - m * qs
            i = np.argmin(np.abs(qs + 1.0))  # start near q=-1
            # walk downhill from the left edge of the barrier region
            left = v[: np.argmax(v[i:]) + i + 1]
            j = np.argmin(v[qs < 0]) if np.any(qs < 0) else 0
            # a left minimum exists iff some interior point left of the
            # barrier is lower than both neighbors
            dv = np.diff(v)
            sign_change = np.nonzero((dv[:-1] < 0) & (dv[1:] > 0))[0]
            return any(qs[s + 1] < 0 for s in sign_change)

        lo, hi = 0.0, 4.0 * k + 1.0
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if has_left_min(mid):
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    @pytest.mark.parametrize("k", [0.5, 1.0, 2.0])
    def test_matches_brute_force(self, k):
        m_star = fold_threshold(k)
        m_brute = self._critical_m_brute(k)
        assert m_star == pytest.approx(m_brute, rel=1e-3)

    def test_documented_value(self):
        assert fold_threshold(1.0) == pytest.approx(1.5396, abs=1e-4)
        assert fold_threshold(0.0) == 0.0
        assert fold_threshold(2.0) == pytest.approx(2 * fold_threshold(1.0), rel=1e-12)


class TestStrandEnergy:
    def test_zero_at_programmed_open_state(self):
        asm = bidir()
        sp = asm.layout.strands[0]
        T_fix = sp.programmed.T_fix
        assert strand_energy(-1.0, T_fix, sp) == pytest.approx(0.0, abs=1e-12)

    def test_contraction_strain_when_hot(self):
        # oracle: (R_f * 0.40 - (1 - R_r) * 0.40) / (1 + (1-R_r)*0.40)
        asm = bidir()
        sp = asm.layout.strands[0]
        m = sp.material
        T_hot = m.T_sw + 10 * m.w
        a0, b1 = sp.strain_coefficients(T_hot)
        eps_at_open = a0 - b1
        expected = (0.97 * 0.40 - 0.004) / 1.004
        assert eps_at_open == pytest.approx(expected, abs=2e-4)
        assert strand_energy(-1.0, T_hot, sp) > 0.0

    def test_gamma_zero_decouples(self):
        asm = bidir()
        sp = asm.layout.strands[0]
        import dataclasses

        sp0 = dataclasses.replace(sp, gamma=0.0)
        u = [strand_energy(q, 50.0, sp0) for q in (-1.0, 0.0, 1.0)]
        assert u[0] == pytest.approx(u[1]) == pytest.approx(u[2])

    def test_never_negative(self):
        asm = bidir()
        for sp in asm.layout.strands:
            for T in (20.0, 40.0, 55.0, 70.0):
                for q in np.linspace(-1.3, 1.3, 27):
                    assert strand_energy(q, T, sp) >= 0.0

    def test_bad_geometry(self):
        import dataclasses

        sp = bidir().layout.strands[0]
        with pytest.raises(ConfigError):
            dataclasses.replace(sp, L0=0.0)


class TestTotalEnergy:
    def test_sum_of_parts(self):
        asm = bidir()
        qL, qR, T = 0.3, -0.7, 45.0
        expected = (
            lobe_energy(qL, T, asm.left)
            + lobe_energy(qR, T, asm.right)
            + sum(strand_energy(qL, T, s) for s in asm.layout.strands)
            + sum(strand_energy(qR, T, s) for s in asm.layout.strands)
        )
        assert total_energy(qL, qR, T, asm) == pytest.approx(expected, abs=1e-12)

    def test_symmetry(self):
        asm = bidir()
        assert total_energy(0.3, -0.7, 45.0, asm) == pytest.approx(
            total_energy(-0.7, 0.3, 45.0, asm), abs=1e-12
        )

    def test_mono_reduces_to_lobes(self):
        asm = mono_l20()
        qL, qR, T = -0.2, 0.9, 39.0
        assert total_energy(qL, qR, T, asm) == lobe_energy(
            qL, T, asm.left
        ) + lobe_energy(qR, T, asm.right)


class TestBuildAssembly:
    def test_diamond_strand_count_and_gap(self):
        asm = bidir(LayoutKind.DIAMOND_SHAPE)
        assert asm.layout.strand_count == 4
        assert asm.x_open == pytest.approx(11.25)

    def test_layout_counts(self):
        assert bidir(LayoutKind.SINGLE_STRAND).layout.strand_count == 1
        assert bidir(LayoutKind.CROSS_SHAPE).layout.strand_count == 2

    def test_mono_has_no_strands(self):
        assert mono_l20().layout is None

    def test_bad_thickness(self):
        with pytest.raises(ConfigError):
            mono_l20(b=0.0)

    def test_layout_without_strand_material(self):
        with pytest.raises(ConfigError):
            build_assembly(
                DemonstratorConfig(
                    lobe_material=presets.material("L20"),
                    layout=LayoutKind.SINGLE_STRAND,
                )
            )

    def test_gaussian_curvature_positive(self):
        spec = mono_l20().left.spec
        assert spec.gaussian_curvature == pytest.approx(1.0 / (40.0 * 110.0))

    def test_asymmetry_splits_lobes(self):
        asm = mono_l20(asymmetry=0.05)
        assert asm.right.k_ref == pytest.approx(1.05 * asm.left.k_ref)
        assert mono_l20().left is mono_l20().right or mono_l20().left == mono_l20().right
