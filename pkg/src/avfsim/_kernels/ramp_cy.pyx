# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled ramp kernel; mirrors ramp_py.solve_ramp operation for operation."""

from libc.math cimport fabs, sqrt

import numpy as np


cdef int _BISECT_ITERS = 64
cdef int _POLISH_ITERS = 8


cdef double _refine(double lo, double hi, double p, double r, bint rising) nogil:
    cdef double mid, g, q, gp
    cdef int it
    for it in range(_BISECT_ITERS):
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
    for it in range(_POLISH_ITERS):
        g = q * q * q + p * q + r
        gp = 3.0 * q * q + p
        if gp > 1e-300 or gp < -1e-300:
            q = q - g / gp
    return q


def solve_ramp(A3, A1, A0, double q0, double snap_dq):
    """See ramp_py.solve_ramp; same contract, same arithmetic."""
    cdef double[::1] a3 = np.ascontiguousarray(A3, dtype=np.float64)
    cdef double[::1] a1 = np.ascontiguousarray(A1, dtype=np.float64)
    cdef double[::1] a0 = np.ascontiguousarray(A0, dtype=np.float64)
    cdef Py_ssize_t n = a3.shape[0]
    q_arr = np.empty(n, dtype=np.float64)
    s_arr = np.zeros(n, dtype=np.uint8)
    cdef double[::1] q_out = q_arr
    cdef unsigned char[::1] snap_out = s_arr
    cdef double q_prev = q0
    cdef double p, r, disc, bound, s, q_mid, q_new
    cdef bint snapped
    cdef Py_ssize_t i
    with nogil:
        for i in range(n):
            p = a1[i] / a3[i]
            r = a0[i] / a3[i]
            disc = -4.0 * p * p * p - 27.0 * r * r
            bound = 1.0 + fabs(p) + fabs(r)
            if disc > 0.0:
                s = sqrt(-p / 3.0)
                q_mid = _refine(-s, s, p, r, 0)
                if q_prev <= q_mid:
                    q_new = _refine(-bound, -s, p, r, 1)
                else:
                    q_new = _refine(s, bound, p, r, 1)
                snapped = 0
            else:
                q_new = _refine(-bound, bound, p, r, 1)
                snapped = 0
                if p < 0.0:
                    s = sqrt(-p / 3.0)
                    if (q_prev <= -s and q_new >= s) or (
                        q_prev >= s and q_new <= -s
                    ):
                        snapped = 1
                    if (not snapped) and fabs(q_new - q_prev) >= snap_dq:
                        snapped = 1
            q_out[i] = q_new
            snap_out[i] = 1 if snapped else 0
            q_prev = q_new
    return q_arr, s_arr
