"""Standalone SVG line plots of motion traces, no plotting library.

The emitted document is deterministic (fixed float formatting, fixed
element order): one ``<polyline>`` per series, one solid reference line at
x = 0 mm, and one dashed vertical reference line per marked switching
temperature.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .traceio import atomic_write_text

__all__ = ["PlotSpec", "emit_plot", "render_plot"]

_W, _H = 720.0, 440.0
_ML, _MR, _MT, _MB = 64.0, 20.0, 24.0, 48.0
_COLORS = ("#1f6fb2", "#c44e52", "#55a868", "#8172b2", "#ccb974", "#64b5cd")


@dataclass(frozen=True)
class PlotSpec:
    """What to draw: series as (label, x column, y column) triples."""

    series: tuple = (("left tip", "temp_C", "x_left_mm"),
                     ("right tip", "temp_C", "x_right_mm"))
    x_label: str = "temperature (degC)"
    y_label: str = "tip displacement (mm)"
    switch_temps: tuple = ()  # dashed vertical markers, degC
    zero_line: bool = True  # solid closed-reference line at y = 0
    title: str = ""


_COLUMNS = ("time_s", "temp_C", "q_left", "q_right", "x_left_mm", "x_right_mm")


def _column(trace, name):
    if name not in _COLUMNS:
        raise ValueError(f"unknown trace column {name!r}; have {_COLUMNS}")
    return getattr(trace, name)


def _fmt(v):
    return f"{v:.2f}"


def render_plot(trace, spec):
    """Render the SVG document for a trace; raises before any I/O."""
    data = []
    for label, xcol, ycol in spec.series:
        data.append((label, _column(trace, xcol), _column(trace, ycol)))

    xs = [v for _, x, _ in data for v in x] or [0.0, 1.0]
    ys = [v for _, _, y in data for v in y] or [0.0, 1.0]
    if spec.zero_line:
        ys = ys + [0.0]
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ys), max(ys)
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_hi = y_lo + 1.0
    pad = 0.05 * (y_hi - y_lo)
    y_lo, y_hi = y_lo - pad, y_hi + pad

    def sx(v):
        return _ML + (v - x_lo) / (x_hi - x_lo) * (_W - _ML - _MR)

    def sy(v):
        return _H - _MB - (v - y_lo) / (y_hi - y_lo) * (_H - _MT - _MB)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W:.0f}" '
        f'height="{_H:.0f}" viewBox="0 0 {_W:.0f} {_H:.0f}">',
        f'<rect x="{_ML}" y="{_MT}" width="{_W - _ML - _MR}" '
        f'height="{_H - _MT - _MB}" fill="none" stroke="#333" stroke-width="1"/>',
    ]
    if spec.title:
        out.append(
            f'<text x="{_W / 2}" y="16" text-anchor="middle" '
            f'font-size="13">{spec.title}</text>'
        )

    # axis tick labels: ends only, quantitative plots belong elsewhere
    out.append(
        f'<text x="{_ML}" y="{_H - _MB + 16}" font-size="11" '
        f'text-anchor="middle">{_fmt(x_lo)}</text>'
    )
    out.append(
        f'<text x="{_W - _MR}" y="{_H - _MB + 16}" font-size="11" '
        f'text-anchor="middle">{_fmt(x_hi)}</text>'
    )
    out.append(
        f'<text x="{_ML - 8}" y="{sy(y_lo)}" font-size="11" '
        f'text-anchor="end">{_fmt(y_lo)}</text>'
    )
    out.append(
        f'<text x="{_ML - 8}" y="{sy(y_hi)}" font-size="11" '
        f'text-anchor="end">{_fmt(y_hi)}</text>'
    )
    out.append(
        f'<text x="{(_ML + _W - _MR) / 2}" y="{_H - 12}" font-size="12" '
        f'text-anchor="middle">{spec.x_label}</text>'
    )
    out.append(
        f'<text x="16" y="{(_MT + _H - _MB) / 2}" font-size="12" '
        f'text-anchor="middle" transform="rotate(-90 16 {(_MT + _H - _MB) / 2})">'
        f"{spec.y_label}</text>"
    )

    if spec.zero_line and y_lo <= 0.0 <= y_hi:
        y0 = sy(0.0)
        out.append(
            f'<line class="refline" x1="{_fmt(_ML)}" y1="{_fmt(y0)}" '
            f'x2="{_fmt(_W - _MR)}" y2="{_fmt(y0)}" stroke="#999" '
            f'stroke-width="1" stroke-dasharray="2,3"/>'
        )
    for T in spec.switch_temps:
        if x_lo <= T <= x_hi:
            xv = sx(T)
            out.append(
                f'<line class="refline" x1="{_fmt(xv)}" y1="{_fmt(_MT)}" '
                f'x2="{_fmt(xv)}" y2="{_fmt(_H - _MB)}" stroke="#666" '
                f'stroke-width="1" stroke-dasharray="6,4"/>'
            )

    for i, (label, xv, yv) in enumerate(data):
        pts = " ".join(f"{_fmt(sx(a))},{_fmt(sy(b))}" for a, b in zip(xv, yv))
        color = _COLORS[i % len(_COLORS)]
        out.append(
            f'<polyline fill="none" stroke="{color}" stroke-width="1.5" '
            f'points="{pts}"/>'
        )
        out.append(
            f'<text x="{_W - _MR - 6}" y="{_MT + 16 + 14 * i}" font-size="11" '
            f'text-anchor="end" fill="{color}">{label}</text>'
        )

    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_plot(trace, spec, path):
    """Validate, render and atomically write the SVG plot."""
    atomic_write_text(path, render_plot(trace, spec))
