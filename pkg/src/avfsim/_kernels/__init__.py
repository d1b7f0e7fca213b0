"""Ramp-equilibrium kernels: compiled extension with pure-Python fallback.

The inner loop of a temperature ramp solves, per step and per lobe, the
cubic stationarity condition A3 q^3 + A1 q + A0 = 0 continuing from the
previous coordinate.  That loop dominates runtime in parameter sweeps and
gain tuning, so it is compiled (Cython) when available.  Both
implementations perform the same floating-point operations in the same
order; ``solve_ramp`` results are expected to be bit-identical.

Set ``AVFSIM_BACKEND=python`` (or ``cython``) to force a backend.
"""

import importlib
import os

from . import ramp_py

_FORCED = os.environ.get("AVFSIM_BACKEND", "").strip().lower()

ramp_cy = None
if _FORCED != "python":
    try:
        ramp_cy = importlib.import_module(".ramp_cy", __name__)
    except ImportError:
        ramp_cy = None
        if _FORCED == "cython":
            raise ImportError(
                "AVFSIM_BACKEND=cython requested but the compiled kernel "
                "is not importable; reinstall with the extension built"
            )

if ramp_cy is not None:
    solve_ramp = ramp_cy.solve_ramp
    BACKEND = "cython"
else:
    solve_ramp = ramp_py.solve_ramp
    BACKEND = "python"


def available_backends():
    """Names of importable kernel backends."""
    names = ["python"]
    if ramp_cy is not None:
        names.insert(0, "cython")
    return names


def kernel_for(name):
    """Return the ``solve_ramp`` callable of a named backend."""
    if name == "python":
        return ramp_py.solve_ramp
    if name == "cython":
        if ramp_cy is None:
            raise ImportError("cython kernel not built")
        return ramp_cy.solve_ramp
    raise ValueError(f"unknown backend {name!r}")
