"""Parameter fitting against force-temperature curves and gain tuning.

``fit_material`` recovers the transition parameters (switching
temperature, half-width) and the plateau force scale from blocked-force
samples by derivative-free simplex minimization with deterministic
restarts.  ``tune_gains`` is the coarse-to-fine grid search that pins the
mechanical gain defaults to the behavioral targets of the demonstrators.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from . import presets
from .errors import DomainError, InfeasibleError, NoProgressError
from .materials import MaterialParams, blocked_recovery_force, program
from .mechanics import DemonstratorConfig, LayoutKind, build_assembly
from .solver import EVENT_SNAP_CLOSE, SolverSettings, ThermalProtocol, run_ramp

__all__ = [
    "ForceSample",
    "FitBounds",
    "FitResult",
    "BehavioralTargets",
    "residuals",
    "fit_material",
    "tune_gains",
    "plateau_force",
]


@dataclass(frozen=True)
class ForceSample:
    T: float  # degC
    F: float  # N

    def __post_init__(self):
        if self.F < 0.0:
            raise ValueError("recovery force samples cannot be negative")


@dataclass(frozen=True)
class FitBounds:
    """Per-parameter search intervals."""

    T_sw: tuple[float, float] = (20.0, 70.0)
    w: tuple[float, float] = (0.2, 12.0)
    plateau: tuple[float, float] = (1e-4, 50.0)

    def contains(self, T_sw, w, plateau):
        return (
            self.T_sw[0] <= T_sw <= self.T_sw[1]
            and self.w[0] <= w <= self.w[1]
            and self.plateau[0] <= plateau <= self.plateau[1]
        )


@dataclass(frozen=True)
class FitResult:
    params: MaterialParams
    rss: float  # N^2
    iterations: int
    converged: bool


def plateau_force(p, eps_prog, A):
    """High-temperature plateau of the blocked recovery force (N)."""
    return p.E_rubbery * A * (p.R_f - (1.0 - p.R_r)) * eps_prog


def residuals(params, prog, A, samples):
    """Model-minus-data residuals (N), in sample order."""
    if not samples:
        raise ValueError("need at least one force sample")
    return [blocked_recovery_force(s.T, prog, params, A) - s.F for s in samples]


def _material_for_theta(init, theta, eps_prog, A):
    """Material with (T_sw, w, plateau) replaced; plateau sets E_rubbery."""
    T_sw, w, plateau = theta
    E_rub = plateau / (A * (init.R_f - (1.0 - init.R_r)) * eps_prog)
    E_rub = min(E_rub, 0.95 * init.E_glassy)  # keep the ordering invariant
    return dataclasses.replace(
        init, T_sw=float(T_sw), w=float(w), E_rubbery=float(E_rub)
    )


def _rss(theta, init, eps_prog, T_fix, A, samples, bounds):
    if not bounds.contains(*theta):
        return 1e30
    m = _material_for_theta(init, theta, eps_prog, A)
    T_hot = m.T_sw + 10.0 * m.w
    try:
        prog = program(m, eps_prog, T_hot, T_fix)
        r = residuals(m, prog, A, samples)
    except (DomainError, ValueError):
        return 1e30
    return float(np.dot(r, r))


# Restart offsets applied multiplicatively to every coordinate, in order.
_RESTART_FACTORS = (1.0, 1.05, 0.95, 1.15)


def fit_material(samples, init, bounds=None, *, eps_prog=0.40,
                 T_fix=presets.PROGRAM_T_FIX, A=0.36):
    """Fit (T_sw, w, plateau force) to blocked-force samples.

    Nelder-Mead from the initial guess plus three deterministically
    perturbed restarts; the winner is the lowest residual sum of squares
    (ties broken by restart order).  The returned result never has a
    higher rss than the initial guess.

    ``converged`` is False when the optimizer failed, a fitted parameter
    sits on its bound, or the sample temperatures never cross the fitted
    transition band (unidentifiable data).

    Raises
    ------
    NoProgressError
        If every restart ends above the initial rss.
    ValueError
        If fewer than 4 samples are given or the initial parameters lie
        outside the bounds.
    """
    if len(samples) < 4:
        raise ValueError("need at least 4 samples spanning the transition")
    if bounds is None:
        bounds = FitBounds()
    theta0 = np.array([init.T_sw, init.w, plateau_force(init, eps_prog, A)])
    if not bounds.contains(*theta0):
        raise ValueError("initial parameters lie outside the fit bounds")

    rss_init = _rss(theta0, init, eps_prog, T_fix, A, samples, bounds)

    best = None
    iterations = 0
    for restart, factor in enumerate(_RESTART_FACTORS):
        x0 = theta0 * factor
        # optimize in init-relative coordinates so the simplex tolerance
        # is relative for every parameter
        scale = np.where(theta0 != 0.0, np.abs(theta0), 1.0)

        def f(z):
            return _rss(z * scale, init, eps_prog, T_fix, A, samples, bounds)

        res = minimize(
            f,
            x0 / scale,
            method="Nelder-Mead",
            options={
                "xatol": 1e-8,
                "fatol": 1e-16,
                "maxiter": 4000,
                "maxfev": 4000,
            },
        )
        iterations += int(res.nfev)
        cand = (float(res.fun), restart, res.x * scale, bool(res.success))
        if best is None or cand[:2] < best[:2]:
            best = cand

    rss_best, _, theta_best, success = best
    if rss_best > rss_init:
        raise NoProgressError(
            f"no restart improved on the initial rss ({rss_init:.3g} N^2)"
        )

    fitted = _material_for_theta(init, theta_best, eps_prog, A)
    T_sw, w, plateau = theta_best

    def _interior(v, lohi, rel=1e-3):
        lo, hi = lohi
        span = hi - lo
        return lo + rel * span < v < hi - rel * span

    temps = np.array([s.T for s in samples])
    covers = temps.min() <= T_sw - w and temps.max() >= T_sw + w
    converged = (
        success
        and _interior(T_sw, bounds.T_sw)
        and _interior(w, bounds.w)
        and plateau > bounds.plateau[0] * 1.001
        and covers
    )
    return FitResult(
        params=fitted, rss=rss_best, iterations=iterations, converged=converged
    )


# ---------------------------------------------------------------------------
# Behavioral gain tuning


@dataclass(frozen=True)
class BehavioralTargets:
    """Demonstrator behaviors the gain defaults must reproduce."""

    smooth_onset_C: float = 30.0
    smooth_completion_C: float = 40.0
    smooth_snap_free: bool = True
    snap_required: bool = True
    snap_temp_C: float = 45.0
    reopen_required: bool = True
    reopen_onset_C: float = 51.0


_COARSE = (0.6, 0.8, 1.0, 1.25, 1.6)
_FINE = (0.85, 1.0, 1.18)


def _behavior_score(beta, gamma, c_geom, targets, proto, settings):
    """Weighted miss over the targets; None when a hard flag fails."""
    from .experiments import compute_metrics  # local import, cycle-free

    smooth_mat = presets.material("L20")
    snap_mat = presets.material("SME25")

    cfg = DemonstratorConfig(lobe_material=smooth_mat, beta=beta, c_geom=c_geom)
    tr = run_ramp(build_assembly(cfg), proto, settings)
    rep = compute_metrics(tr, None, settings)
    if targets.smooth_snap_free and rep.snap_class != "smooth":
        return None
    if rep.onset_temp is None or rep.closure_temp is None:
        return None
    score = abs(rep.onset_temp - targets.smooth_onset_C)
    score += abs(rep.closure_temp - targets.smooth_completion_C)

    cfg = DemonstratorConfig(lobe_material=snap_mat, c_geom=c_geom)
    tr = run_ramp(build_assembly(cfg), proto, settings)
    rep = compute_metrics(tr, None, settings)
    snaps = [e for e in _trace_snaps(tr, settings) if e.kind == EVENT_SNAP_CLOSE]
    if targets.snap_required and len(snaps) != 1:
        return None
    if snaps:
        score += abs(snaps[0].temp_C - targets.snap_temp_C)

    if targets.reopen_required:
        cfg = DemonstratorConfig(
            lobe_material=smooth_mat,
            beta=beta,
            c_geom=c_geom,
            gamma=gamma,
            layout=LayoutKind.SINGLE_STRAND,
            strand_material=presets.strand_material_for(snap_mat),
        )
        tr = run_ramp(build_assembly(cfg), proto, settings)
        rep = compute_metrics(tr, None, settings)
        if rep.reopening_temp is None or rep.closure_temp is None:
            return None
        score += 0.5 * abs(rep.reopening_temp - targets.reopen_onset_C)
    return score


def _trace_snaps(trace, settings):
    from .solver import detect_events

    return detect_events(trace, None, settings).snap_events


def tune_gains(targets=None, *, center=None, proto=None, settings=None):
    """Grid-search (beta, gamma, c_geom) against behavioral targets.

    Coarse multiplicative grid around the shipped defaults, then one
    refinement pass around the coarse winner.  Fully deterministic: grid
    points are visited in lexicographic order and the first minimizer
    wins.  Raises :class:`InfeasibleError` when no point satisfies the
    hard snap/no-snap flags.
    """
    if targets is None:
        targets = BehavioralTargets()
    if center is None:
        from .mechanics import C_GEOM, GAMMA_DEFAULT

        center = (presets.bias_gain("L20"), GAMMA_DEFAULT, C_GEOM)
    if proto is None:
        proto = ThermalProtocol()
    if settings is None:
        settings = SolverSettings()

    def search(factors, around):
        best = None
        for fb in factors:
            for fg in factors:
                for fc in factors:
                    beta = around[0] * fb
                    gamma = around[1] * fg
                    c_geom = around[2] * fc
                    score = _behavior_score(
                        beta, gamma, c_geom, targets, proto, settings
                    )
                    if score is None:
                        continue
                    if best is None or score < best[0] - 1e-12:
                        best = (score, (beta, gamma, c_geom))
        return best

    coarse = search(_COARSE, center)
    if coarse is None:
        raise InfeasibleError(
            "no grid point satisfies the hard snap/no-snap constraints"
        )
    fine = search(_FINE, coarse[1])
    best = fine if fine is not None and fine[0] < coarse[0] - 1e-12 else coarse
    return best[1]
