"""Pure-Python ramp kernel.

Reference implementation of the per-step equilibrium continuation; the
Cython kernel mirrors it operation for operation.  The per-step gradient
is the cubic

    g(q) = A3 q^3 + A1 q + A0          (A3 = 4 k > 0, no q^2 term)

whose root structure is decided by the discriminant of the monic form
q^3 + p q + r.  Three real roots means a bistable landscape: the outer
roots are minima, the middle one the barrier, and the continuation keeps
the minimum on the previous coordinate's side.  One real root means a
single-well landscape; the step is flagged as a snap when the well the
coordinate was tracking has vanished, i.e. when the landscape still has a
concave stretch (p < 0, inflections at +-sqrt(-p/3)) and the previous
coordinate and the surviving minimum sit on opposite sides of it.

Root finding is a fixed 64-iteration bisection plus a fixed 8-iteration
Newton polish: data-independent operation counts keep results
deterministic and identical across backends (only +-*/ and sqrt are used,
all correctly rounded under IEEE-754).
"""

import math

import numpy as np

_BISECT_ITERS = 64
_POLISH_ITERS = 8


def _refine(lo, hi, p, r, rising):
    """Bisect a bracketed root of q^3 + p q + r, then Newton-polish it."""
    for _ in range(_BISECT_ITERS):
        mid = 0.5 * (lo + hi)
        g = mid * mid * mid + p * mid + r
        if rising:
            if g < 0.0:
                lo = mid
            else:
                hi = mid
        else:
            if g > 0.0:
                lo = mid
            else:
                hi = mid
    q = 0.5 * (lo + hi)
    for _ in range(_POLISH_ITERS):
        g = q * q * q + p * q + r
        gp = 3.0 * q * q + p
        if gp > 1e-300 or gp < -1e-300:
            q = q - g / gp
    return q


def _step(p, r, q_prev, snap_dq):
    """One equilibrium step; returns (q_new, snapped)."""
    disc = -4.0 * p * p * p - 27.0 * r * r
    bound = 1.0 + abs(p) + abs(r)
    if disc > 0.0:
        # Bistable: pick the minimum on q_prev's side of the barrier.
        s = math.sqrt(-p / 3.0)
        q_mid = _refine(-s, s, p, r, rising=False)
        if q_prev <= q_mid:
            q_new = _refine(-bound, -s, p, r, rising=True)
        else:
            q_new = _refine(s, bound, p, r, rising=True)
        return q_new, False
    # Single well (or exact fold: bisection converges to the survivor,
    # since the sign only changes at the simple root).
    q_new = _refine(-bound, bound, p, r, rising=True)
    snapped = False
    if p < 0.0:
        s = math.sqrt(-p / 3.0)
        if (q_prev <= -s and q_new >= s) or (q_prev >= s and q_new <= -s):
            snapped = True
    if not snapped and abs(q_new - q_prev) >= snap_dq:
        # Defensive: a basin-scale jump without the inflection signature
        # still counts as a snap.
        snapped = True if p < 0.0 else False
    return q_new, snapped


def solve_ramp(A3, A1, A0, q0, snap_dq):
    """Continue the equilibrium through a whole coefficient schedule.

    Parameters
    ----------
    A3, A1, A0 : float64 arrays, one entry per temperature step
        Cubic gradient coefficients of the per-lobe potential.
    q0 : float
        Starting coordinate (equilibrated at the first entry too).
    snap_dq : float
        Coordinate jump above which a single-well relocation counts as a
        snap even without the inflection signature.

    Returns
    -------
    (q, snapped) : float64 array, uint8 array
    """
    n = len(A3)
    q_out = np.empty(n, dtype=np.float64)
    snap_out = np.zeros(n, dtype=np.uint8)
    a3 = memoryview(np.ascontiguousarray(A3, dtype=np.float64))
    a1 = memoryview(np.ascontiguousarray(A1, dtype=np.float64))
    a0 = memoryview(np.ascontiguousarray(A0, dtype=np.float64))
    q_prev = q0
    for i in range(n):
        p = a1[i] / a3[i]
        r = a0[i] / a3[i]
        q_new, snapped = _step(p, r, q_prev, snap_dq)
        q_out[i] = q_new
        snap_out[i] = 1 if snapped else 0
        q_prev = q_new
    return q_out, snap_out
