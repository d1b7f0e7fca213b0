"""Deterministic trace CSV emission and ingestion.

One row per solver step, fixed header, six significant digits, LF line
endings; re-emitting the same trace is byte-identical.  Files are written
to a temporary sibling and renamed into place so readers never observe a
partial file.
"""

from __future__ import annotations

import os
import tempfile

import numpy as np

from .solver import EVENT_NONE, EVENT_SNAP_CLOSE, EVENT_SNAP_OPEN, MotionTrace

__all__ = ["TRACE_HEADER", "emit_trace", "read_trace", "atomic_write_text"]

TRACE_HEADER = "time_s,temp_C,q_left,q_right,x_left_mm,x_right_mm,event"

_TOKENS = {EVENT_NONE, EVENT_SNAP_CLOSE, EVENT_SNAP_OPEN}


def _fmt(v):
    return f"{v:.6g}"


def atomic_write_text(path, text):
    """Write text to ``path`` via a temporary file and rename."""
    d = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp_", text=True)
    try:
        with os.fdopen(fd, "w", newline="\n") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def render_trace(trace):
    """Trace as CSV text (header + one line per row, LF separated)."""
    lines = [TRACE_HEADER]
    for i in range(len(trace)):
        lines.append(
            ",".join(
                (
                    _fmt(trace.time_s[i]),
                    _fmt(trace.temp_C[i]),
                    _fmt(trace.q_left[i]),
                    _fmt(trace.q_right[i]),
                    _fmt(trace.x_left_mm[i]),
                    _fmt(trace.x_right_mm[i]),
                    trace.event[i],
                )
            )
        )
    return "\n".join(lines) + "\n"


def emit_trace(trace, path):
    """Write the trace CSV atomically; byte-stable for identical traces."""
    atomic_write_text(path, render_trace(trace))


def read_trace(path_or_text, x_open=0.0):
    """Parse a trace CSV back into a :class:`MotionTrace`.

    Accepts a path or raw CSV text.  ``x_open`` is not stored in the file;
    pass it when downstream analysis needs displacement-relative
    thresholds (otherwise consumers fall back to the assembly).
    """
    if "\n" in str(path_or_text):
        text = path_or_text
    else:
        with open(path_or_text, "r", newline="") as f:
            text = f.read()
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != TRACE_HEADER:
        raise ValueError(f"not a trace CSV (expected header {TRACE_HEADER!r})")
    cols = [[], [], [], [], [], []]
    events = []
    for ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) != 7:
            raise ValueError(f"malformed trace row: {ln!r}")
        for c, v in zip(cols, parts[:6]):
            c.append(float(v))
        if parts[6] not in _TOKENS:
            raise ValueError(f"unknown event token {parts[6]!r}")
        events.append(parts[6])
    arrs = [np.asarray(c, dtype=np.float64) for c in cols]
    return MotionTrace(
        time_s=arrs[0],
        temp_C=arrs[1],
        q_left=arrs[2],
        q_right=arrs[3],
        x_left_mm=arrs[4],
        x_right_mm=arrs[5],
        event=events,
        x_open=x_open,
    ).validate()
