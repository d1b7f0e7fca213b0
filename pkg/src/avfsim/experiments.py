"""Replication layer: motion metrics, design sweeps, statistics, presets.

Relative motion percentages follow the convention of the motion-tracking
analysis they mirror: 100% closure means the tips reached the reference
line, 100% reopening means the lobes recovered the full programmed open
gap after closing, and the range of motion is the arithmetic mean of the
two.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import betainc

from . import presets
from .errors import DegenerateGroupError, EmptyTraceError, UnknownPresetError
from .mechanics import DemonstratorConfig, LayoutKind, build_assembly
from .solver import (
    EVENT_SNAP_CLOSE,
    SolverSettings,
    ThermalProtocol,
    detect_events,
    run_ramp,
)

__all__ = [
    "MetricsReport",
    "SweepCell",
    "GroupStats",
    "compute_metrics",
    "design_sweep",
    "welch_t_test",
    "preset",
    "PRESET_NAMES",
    "OUTCOME_FAIL",
    "OUTCOME_CLOSE",
    "OUTCOME_SNAP_CLOSE",
    "synthetic_max_force_groups",
]

OUTCOME_FAIL = "Fail"
OUTCOME_CLOSE = "Close"
OUTCOME_SNAP_CLOSE = "SnapClose"

SNAP_SMOOTH = "smooth"
SNAP_SNAP = "snap"
SNAP_FAILED = "failed"

PRESET_NAMES = ("L20_mono", "SME25_mono", "bidir_single", "bidir_cross", "bidir_diamond")


@dataclass(frozen=True)
class MetricsReport:
    closure_pct: float
    reopening_pct: float
    rom_pct: float
    snap_class: str  # smooth | snap | failed
    closure_temp: float | None
    reopening_temp: float | None
    onset_temp: float | None  # first 5% tip motion


@dataclass(frozen=True)
class SweepCell:
    a: float
    b: float
    material: str
    outcome: str  # Fail | Close | SnapClose


@dataclass(frozen=True)
class GroupStats:
    label: str
    n: int
    mean: float
    sd: float

    @classmethod
    def from_samples(cls, label, samples):
        x = np.asarray(samples, dtype=float)
        if len(x) < 2:
            raise ValueError(f"group {label!r} needs at least 2 samples")
        return cls(label=label, n=len(x), mean=float(x.mean()), sd=float(x.std(ddof=1)))


def _onset_temp(x, temps, x_start, x_open):
    """First temperature with at least 5% of the open gap of tip motion."""
    moved = np.nonzero(x_start - x >= 0.05 * x_open)[0]
    return float(temps[moved[0]]) if len(moved) else None


def compute_metrics(trace, asm, s=None):
    """Motion metrics of one trace.

    Closure is how much of the open gap was traversed at the lowest point,
    reopening how much of the traversed gap was regained afterwards (both
    per lobe, averaged); the range of motion is their arithmetic mean.
    """
    if len(trace) == 0:
        raise EmptyTraceError("cannot compute metrics of an empty trace")
    if s is None:
        s = SolverSettings()
    x_open = trace.x_open if trace.x_open else asm.x_open
    temps = np.asarray(trace.temp_C)

    closures = []
    reopenings = []
    onsets = []
    for x in (np.asarray(trace.x_left_mm), np.asarray(trace.x_right_mm)):
        i_min = int(np.argmin(x))
        x_min = float(x[i_min])
        closures.append(100.0 * (x_open - x_min) / x_open)
        traversed = x_open - x_min
        if traversed > 0.0:
            x_back = float(np.max(x[i_min:]))
            reopenings.append(100.0 * (x_back - x_min) / traversed)
        else:
            reopenings.append(0.0)
        onsets.append(_onset_temp(x, temps, float(x[0]), x_open))

    closure_pct = float(np.mean(closures))
    reopening_pct = float(np.mean(reopenings))
    report = detect_events(trace, asm, s)
    if report.closure_temp is None:
        snap_class = SNAP_FAILED
    elif any(e.kind == EVENT_SNAP_CLOSE for e in report.snap_events):
        snap_class = SNAP_SNAP
    else:
        snap_class = SNAP_SMOOTH
    onset = None
    if all(o is not None for o in onsets):
        onset = max(onsets)

    return MetricsReport(
        closure_pct=closure_pct,
        reopening_pct=reopening_pct,
        rom_pct=(closure_pct + reopening_pct) / 2.0,
        snap_class=snap_class,
        closure_temp=report.closure_temp,
        reopening_temp=report.reopening_onset_temp,
        onset_temp=onset,
    )


def _sweep_cell(args):
    a, b, mat_name, proto, settings = args
    cfg = DemonstratorConfig(
        lobe_material=presets.material(mat_name), length_mm=a, thickness_mm=b
    )
    asm = build_assembly(cfg)
    trace = run_ramp(asm, proto, settings)
    rep = compute_metrics(trace, asm, settings)
    if rep.snap_class == SNAP_FAILED:
        outcome = OUTCOME_FAIL
    elif rep.snap_class == SNAP_SNAP:
        outcome = OUTCOME_SNAP_CLOSE
    else:
        outcome = OUTCOME_CLOSE
    return SweepCell(a=a, b=b, material=mat_name, outcome=outcome)


def design_sweep(lengths, thicknesses, material_name, proto=None, s=None, jobs=1):
    """Mono-material closure sweep over lobe length x thickness.

    Returns cells in row-major (length, thickness) order regardless of
    execution order; each cell's outcome depends only on its own ramp.
    """
    if not lengths or not thicknesses:
        raise ValueError("sweep grids must be nonempty")
    if proto is None:
        proto = ThermalProtocol()
    if s is None:
        s = SolverSettings()
    tasks = [(a, b, material_name, proto, s) for a in lengths for b in thicknesses]
    if jobs > 1:
        from multiprocessing import Pool

        with Pool(processes=jobs) as pool:
            cells = pool.map(_sweep_cell, tasks)
    else:
        cells = [_sweep_cell(t) for t in tasks]
    return cells


def welch_t_test(x1, x2):
    """Two-sided Welch's t-test on two sample sequences.

    Returns (t, p) with Welch-Satterthwaite degrees of freedom; the
    p-value comes from the regularized incomplete beta function.  Raises
    DegenerateGroupError when both sample variances vanish (for equal
    means the p-value is 1 by definition, but the statistic is undefined).
    """
    a = np.asarray(x1, dtype=float)
    b = np.asarray(x2, dtype=float)
    if len(a) < 2 or len(b) < 2:
        raise ValueError("each group needs at least 2 samples")
    v1 = a.var(ddof=1)
    v2 = b.var(ddof=1)
    m1, m2 = a.mean(), b.mean()
    se2 = v1 / len(a) + v2 / len(b)
    if se2 == 0.0:
        raise DegenerateGroupError(
            "both groups have zero variance"
            + ("; means equal, p would be 1" if m1 == m2 else "")
        )
    t = (m1 - m2) / math.sqrt(se2)
    df = se2 * se2 / (
        (v1 / len(a)) ** 2 / (len(a) - 1) + (v2 / len(b)) ** 2 / (len(b) - 1)
    )
    # two-sided p: survival of |t| under Student-t via I_x(df/2, 1/2)
    x = df / (df + t * t)
    p = float(betainc(df / 2.0, 0.5, x))
    return float(t), min(max(p, 0.0), 1.0)


def preset(name):
    """Named demonstrator: returns (assembly, protocol).

    Mono presets are 60 x 2 mm lobes of one material; bidirectional
    presets combine the low-transition lobes with prestrained
    high-transition strands in one of the three layouts.
    """
    proto = ThermalProtocol()
    if name == "L20_mono":
        cfg = DemonstratorConfig(lobe_material=presets.material("L20"))
    elif name == "SME25_mono":
        cfg = DemonstratorConfig(lobe_material=presets.material("SME25"))
    elif name in ("bidir_single", "bidir_cross", "bidir_diamond"):
        kind = {
            "bidir_single": LayoutKind.SINGLE_STRAND,
            "bidir_cross": LayoutKind.CROSS_SHAPE,
            "bidir_diamond": LayoutKind.DIAMOND_SHAPE,
        }[name]
        cfg = DemonstratorConfig(
            lobe_material=presets.material("L20"),
            layout=kind,
            strand_material=presets.strand_material_for(presets.material("SME25")),
        )
    else:
        raise UnknownPresetError(
            f"unknown preset {name!r}; known: {', '.join(PRESET_NAMES)}"
        )
    return build_assembly(cfg), proto


def synthetic_max_force_groups(A=0.36, eps_prog=0.35):
    """Deterministic replicate groups of peak recovery force per material.

    Mirrors a blocked-force group comparison: each replicate perturbs the
    sample cross-section slightly (fixed jitter pattern), sweeps the ramp
    range and records the maximum blocked force.  Used by the stats demo
    and tests; not a fit to any measured data.
    """
    from .materials import blocked_recovery_force, program

    temps = np.arange(20.0, 70.0, 0.25)
    out = {}
    for name, n in (("L20", 6), ("SME25", 5), ("SME40", 4)):
        m = presets.material(name)
        prog = program(m, eps_prog, m.T_sw + 10 * m.w, presets.PROGRAM_T_FIX)
        forces = []
        for i in range(n):
            jitter = 0.06 * math.sin(2.39996 * (i + 1))  # fixed, zero-mean-ish
            area = A * (1.0 + jitter)
            forces.append(
                max(blocked_recovery_force(T, prog, m, area) for T in temps)
            )
        out[name] = forces
    return out
