"""Quasi-static temperature-ramp continuation.

At each temperature step every lobe is moved to the mechanical equilibrium
reachable from its previous coordinate; a disappearing well (fold) makes
the coordinate jump basins, which is recorded as a snap event.  The heavy
per-step work runs in a kernel (compiled when available, pure Python
otherwise); ``equilibrate_step`` below is the generic single-step solver
for arbitrary differentiable potentials, used directly by tests and the
fold-threshold oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._kernels import BACKEND, kernel_for, solve_ramp
from .errors import ConvergenceError

__all__ = [
    "ThermalProtocol",
    "SolverSettings",
    "MotionTrace",
    "EventReport",
    "SnapEvent",
    "equilibrate_step",
    "run_ramp",
    "fold_threshold",
    "detect_events",
    "EVENT_NONE",
    "EVENT_SNAP_CLOSE",
    "EVENT_SNAP_OPEN",
]

EVENT_NONE = "none"
EVENT_SNAP_CLOSE = "snap_close"
EVENT_SNAP_OPEN = "snap_open"

# A single-step coordinate move at least this large, in a landscape whose
# well structure just collapsed, is treated as a basin jump; smooth
# continuation steps stay well below it at the shipped step sizes.
SNAP_DQ = 0.1


@dataclass(frozen=True)
class ThermalProtocol:
    """Linear heating ramp."""

    T_start: float = 20.0
    T_end: float = 70.0
    rate: float = 1.0  # degC per minute
    dT_step: float = 0.05  # degC per solver step

    def __post_init__(self):
        if self.T_end <= self.T_start:
            raise ValueError("T_end must exceed T_start")
        if self.rate <= 0.0:
            raise ValueError("heating rate must be positive")
        if not (0.0 < self.dT_step <= 1.0):
            raise ValueError("dT_step must lie in (0, 1]")

    def temperatures(self):
        """Step grid: T_start + i*dT_step, inclusive of both ends."""
        n = int(math.floor((self.T_end - self.T_start) / self.dT_step + 1e-9))
        return self.T_start + self.dT_step * np.arange(n + 1, dtype=np.float64)

    def time_of(self, temp):
        """Seconds elapsed when the ramp reaches ``temp``."""
        return (temp - self.T_start) / self.rate * 60.0


@dataclass(frozen=True)
class SolverSettings:
    grad_tol: float = 1e-10
    max_iter: int = 100
    q_scan_lo: float = -1.5
    q_scan_hi: float = 1.5
    q_scan_points: int = 2001
    snap_window_s: float = 0.04  # one video frame at 25 fps
    snap_fraction: float = 0.3  # of the open gap

    def __post_init__(self):
        if self.grad_tol <= 0 or self.max_iter <= 0 or self.q_scan_points < 8:
            raise ValueError("solver settings must be positive")
        if self.snap_window_s <= 0 or not (0 < self.snap_fraction <= 1):
            raise ValueError("snap detection settings out of range")


@dataclass
class MotionTrace:
    """Time/temperature/coordinate/displacement series of one ramp."""

    time_s: np.ndarray
    temp_C: np.ndarray
    q_left: np.ndarray
    q_right: np.ndarray
    x_left_mm: np.ndarray
    x_right_mm: np.ndarray
    event: list[str]
    x_open: float = 0.0
    backend: str = ""

    def __len__(self):
        return len(self.temp_C)

    def validate(self):
        n = len(self.temp_C)
        cols = (self.time_s, self.q_left, self.q_right, self.x_left_mm, self.x_right_mm)
        if any(len(c) != n for c in cols) or len(self.event) != n:
            raise ValueError("trace columns have mismatched lengths")
        if n > 1 and not np.all(np.diff(self.temp_C) > 0):
            raise ValueError("temperature must be strictly increasing")
        bad = set(self.event) - {EVENT_NONE, EVENT_SNAP_CLOSE, EVENT_SNAP_OPEN}
        if bad:
            raise ValueError(f"unknown event tokens: {sorted(bad)}")
        return self


@dataclass(frozen=True)
class SnapEvent:
    temp_C: float
    kind: str  # EVENT_SNAP_CLOSE or EVENT_SNAP_OPEN
    row: int


@dataclass(frozen=True)
class EventReport:
    """What the ramp did, read off the trace."""

    closure_temp: float | None
    reopening_onset_temp: float | None
    snap_events: tuple[SnapEvent, ...]
    final_x_rel: tuple[float, float]  # x_final / x_open per lobe

    @property
    def closed(self):
        return self.closure_temp is not None

    @property
    def reopened(self):
        return self.reopening_onset_temp is not None


def fold_threshold(k):
    """Tilt at which the open well of k (q^2-1)^2 - m q vanishes: 8k/(3 sqrt 3)."""
    if k < 0:
        raise ValueError("stiffness must be non-negative")
    return 8.0 * k / (3.0 * math.sqrt(3.0))


# ---------------------------------------------------------------------------
# Generic single-step equilibration


def _numeric_grad(energy, T, h=1e-6):
    def g(q):
        return (energy(q + h, T) - energy(q - h, T)) / (2.0 * h)

    return g


def _refine_root(g, lo, hi, glo, tol, max_iter):
    """Bisection + Newton on a bracketed sign change of g."""
    q = 0.5 * (lo + hi)
    for _ in range(max_iter):
        q = 0.5 * (lo + hi)
        gq = g(q)
        if abs(gq) < tol or hi - lo < 1e-15:
            break
        if (gq > 0) == (glo > 0):
            lo = q
        else:
            hi = q
    return q


def _critical_points(g, s):
    """Roots of g on the scan grid, classified as (q, is_minimum)."""
    qs = np.linspace(s.q_scan_lo, s.q_scan_hi, s.q_scan_points)
    gv = np.array([g(q) for q in qs])
    pts = []
    for i in range(len(qs) - 1):
        a, b = gv[i], gv[i + 1]
        if a == 0.0:
            pts.append((qs[i], gv[i + 1] > gv[max(i - 1, 0)]))
        elif (a < 0.0) != (b < 0.0):
            q = _refine_root(g, qs[i], qs[i + 1], a, 1e-14, 200)
            pts.append((q, b > a))
    return pts


def equilibrate_step(q_prev, T, lobe_context, s, grad=None):
    """Advance one lobe to equilibrium at temperature ``T``.

    Parameters
    ----------
    q_prev : float
        Coordinate at the previous step; defines the starting basin.
    lobe_context : callable(q, T) -> energy
        Per-lobe potential, differentiable in q on the scan range.
    s : SolverSettings
    grad : callable(q, T) -> dV/dq, optional
        Analytic gradient; finite differences otherwise.

    Returns
    -------
    (q, snapped) : float, bool
        The reached local minimizer (|dV/dq| < grad_tol) and whether it
        required a basin jump (fold).

    Raises
    ------
    ConvergenceError
        If no minimum can be located to tolerance within the iteration
        budget (ill-conditioned configuration).
    """
    if grad is None:
        g = _numeric_grad(lobe_context, T)
        tol = max(s.grad_tol, 1e-8)  # finite differences cap the accuracy
    else:
        def g(q, _T=T):
            return grad(q, _T)

        tol = s.grad_tol

    pts = _critical_points(g, s)
    minima = [q for q, is_min in pts if is_min]
    maxima = [q for q, is_min in pts if not is_min]
    if not minima:
        raise ConvergenceError(
            f"no minimum of the potential found on "
            f"[{s.q_scan_lo}, {s.q_scan_hi}] at T={T:g}"
        )

    if maxima:
        lo_wall = max((m for m in maxima if m <= q_prev), default=-math.inf)
        hi_wall = min((m for m in maxima if m > q_prev), default=math.inf)
        basin = [q for q in minima if lo_wall <= q <= hi_wall]
        if basin:
            q_star = min(basin, key=lambda q: abs(q - q_prev))
            return float(_polish(q_star, g, s, tol)), False
        # Fold: no minimum left between the walls around q_prev.
        q_star = min(minima, key=lambda q: lobe_context(q, T))
        return float(_polish(q_star, g, s, tol)), True

    # Single-well landscape: a snap is a relocation across a concave
    # stretch of the potential (the ghost of the vanished well).
    q_star = float(_polish(minima[0], g, s, tol))
    snapped = False
    if q_star != q_prev:
        span = np.linspace(q_prev, q_star, 41)
        mid = span[1:-1]
        if len(mid) and any(_second_diff(g, q) < 0.0 for q in mid):
            snapped = abs(q_star - q_prev) >= SNAP_DQ
    return q_star, bool(snapped)


def _second_diff(g, q, h=1e-5):
    return (g(q + h) - g(q - h)) / (2.0 * h)


def _polish(q, g, s, tol):
    """Damped Newton with backtracking until |g| < tol."""
    gq = g(q)
    for _ in range(s.max_iter):
        if abs(gq) < tol:
            return q
        gp = _second_diff(g, q)
        step = -gq / gp if gp != 0.0 else -math.copysign(1e-3, gq)
        t = 1.0
        while t > 1.0 / 1024.0:
            q_try = q + t * step
            g_try = g(q_try)
            if abs(g_try) < abs(gq):
                q, gq = q_try, g_try
                break
            t *= 0.5
        else:
            break
    if abs(gq) >= tol:
        raise ConvergenceError(
            f"equilibrium residual {abs(gq):.3g} above tolerance {tol:g} "
            f"after {s.max_iter} iterations"
        )
    return q


# ---------------------------------------------------------------------------
# Full-ramp continuation


def _gradient_coefficients(lobe, strands, temps):
    """Cubic gradient coefficient schedule for one lobe.

    dV/dq = A3 q^3 + A1 q + A0 where the lobe contributes
    4k q^3 + (h - 4k) q - h c and each strand group 2 w C b (a + b q).
    """
    n = len(temps)
    A3 = np.empty(n)
    A1 = np.empty(n)
    A0 = np.empty(n)
    for i, T in enumerate(temps):
        k, h, c = lobe.coefficients(T)
        a1 = -4.0 * k + h
        a0 = -h * c
        for sp in strands:
            a_lin, b_lin = sp.strain_coefficients(T)
            two_wc = 2.0 * sp.count_weight * sp.energy_scale(T)
            a1 += two_wc * b_lin * b_lin
            a0 += two_wc * a_lin * b_lin
        A3[i] = 4.0 * k
        A1[i] = a1
        A0[i] = a0
    return A3, A1, A0


def _window_start(times, i, window):
    """Earliest row j whose elapsed time to row i fits the snap window.

    Rows are usually spaced wider than the window; then the previous row
    is used, which reads an inter-row jump as effectively instantaneous.
    """
    j = i - 1
    while j > 0 and times[i] - times[j - 1] <= window:
        j -= 1
    return j


def _displacement_events(times, temps, x_cols, x_open, s):
    """Rows where a tip moved a basin-scale distance within the window."""
    threshold = s.snap_fraction * x_open
    found = {}
    n = len(times)
    for i in range(1, n):
        j = _window_start(times, i, s.snap_window_s)
        for x in x_cols:
            dx = x[i] - x[j]
            if abs(dx) >= threshold:
                kind = EVENT_SNAP_CLOSE if dx < 0 else EVENT_SNAP_OPEN
                found.setdefault(i, kind)
                break
    return found


def run_ramp(asm, proto, s=None, backend=None):
    """Simulate one heating ramp of an assembly and return its trace.

    Both lobes start at q = -1 (programmed open) and are advanced
    independently step by step.  Events mark solver-detected basin jumps
    and any window displacement exceeding the snap fraction of the open
    gap.  Deterministic: identical inputs give identical traces.
    """
    if s is None:
        s = SolverSettings()
    kern = solve_ramp if backend is None else kernel_for(backend)
    temps = proto.temperatures()
    strands = asm.layout.strands if asm.layout is not None else ()

    qs = []
    snaps = []
    for lobe in asm.lobes():
        A3, A1, A0 = _gradient_coefficients(lobe, strands, temps)
        q, snapped = kern(A3, A1, A0, -1.0, SNAP_DQ)
        qs.append(q)
        snaps.append(snapped)
    q_left, q_right = qs

    x_open = asm.x_open
    x_left = x_open * (1.0 - q_left) / 2.0
    x_right = x_open * (1.0 - q_right) / 2.0
    times = proto.time_of(temps)

    events = [EVENT_NONE] * len(temps)
    for snapped, q in zip(snaps, qs):
        for i in np.nonzero(snapped)[0]:
            i = int(i)
            dq = q[i] - (q[i - 1] if i else -1.0)
            events[i] = EVENT_SNAP_CLOSE if dq > 0 else EVENT_SNAP_OPEN
    for i, kind in _displacement_events(times, temps, (x_left, x_right), x_open, s).items():
        if events[i] == EVENT_NONE:
            events[i] = kind

    return MotionTrace(
        time_s=times,
        temp_C=temps,
        q_left=q_left,
        q_right=q_right,
        x_left_mm=x_left,
        x_right_mm=x_right,
        event=events,
        x_open=x_open,
        backend=BACKEND if backend is None else backend,
    ).validate()


def detect_events(trace, asm, s=None):
    """Read closure, reopening onset and snap events off a trace.

    Closure is the first temperature at which both tips sit within 5% of
    the open gap from the reference line; reopening onset the first later
    temperature at which both tips have risen at least 5% of the open gap
    above their running minimum.  Snap events are the union of the trace's
    event column and a window-displacement scan (so hand-built traces
    without event tokens still report their jumps).
    """
    if s is None:
        s = SolverSettings()
    x_open = trace.x_open if trace.x_open else asm.x_open
    close_tol = 0.05 * x_open
    xl = np.asarray(trace.x_left_mm)
    xr = np.asarray(trace.x_right_mm)
    temps = np.asarray(trace.temp_C)

    closed = (np.abs(xl) <= close_tol) & (np.abs(xr) <= close_tol)
    idx = np.nonzero(closed)[0]
    closure_row = int(idx[0]) if len(idx) else None
    closure_temp = float(temps[closure_row]) if closure_row is not None else None

    run_min_l = np.minimum.accumulate(xl)
    run_min_r = np.minimum.accumulate(xr)
    rising = (xl >= run_min_l + close_tol) & (xr >= run_min_r + close_tol)
    start = closure_row if closure_row is not None else 0
    idx = np.nonzero(rising[start:])[0]
    reopen_temp = float(temps[start + idx[0]]) if len(idx) else None

    rows = {}
    for i, tok in enumerate(trace.event):
        if tok != EVENT_NONE:
            rows[i] = tok
    disp = _displacement_events(
        np.asarray(trace.time_s), temps, (xl, xr), x_open, s
    )
    for i, kind in disp.items():
        rows.setdefault(i, kind)
    snap_events = tuple(
        SnapEvent(temp_C=float(temps[i]), kind=rows[i], row=i) for i in sorted(rows)
    )

    final = (float(xl[-1] / x_open), float(xr[-1] / x_open))
    return EventReport(
        closure_temp=closure_temp,
        reopening_onset_temp=reopen_temp,
        snap_events=snap_events,
        final_x_rel=final,
    )
