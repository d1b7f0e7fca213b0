"""Command-line front end.

Subcommands: ``simulate`` (ramp -> trace CSV, optional SVG), ``sweep``
(closure matrix over lobe dimensions), ``calibrate`` (fit transition
parameters to force samples), ``metrics`` (motion metrics of a trace),
``presets`` (list shipped demonstrators).  Exit codes: 0 success, 1
usage/validation error, 2 solver error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import calibration, experiments, plotting, traceio
from .config import load_config, serialize_config
from .errors import (
    AvfsimError,
    ConvergenceError,
    ParseError,
    UnknownPresetError,
    ValidationError,
)
from .solver import run_ramp

__all__ = ["main", "entry"]

GLYPHS = {
    experiments.OUTCOME_CLOSE: "✓",
    experiments.OUTCOME_SNAP_CLOSE: "✓✓",
    experiments.OUTCOME_FAIL: "×",
}


class _Parser(argparse.ArgumentParser):
    """argparse that exits 1 on usage errors (default would be 2)."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _build_parser():
    p = _Parser(prog="avfsim", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run one thermal ramp")
    sim.add_argument("--config", required=True, help="TOML run configuration")
    sim.add_argument("--out", required=True, help="trace CSV output path")
    sim.add_argument("--svg", help="optional SVG plot output path")
    sim.add_argument("--backend", choices=("cython", "python"),
                     help="force a ramp kernel backend")

    sw = sub.add_parser("sweep", help="closure matrix over lobe dimensions")
    sw.add_argument("--config", required=True)
    sw.add_argument("--lengths", required=True,
                    help="comma-separated lobe lengths (mm)")
    sw.add_argument("--thicknesses", required=True,
                    help="comma-separated lobe thicknesses (mm)")
    sw.add_argument("--out", required=True, help="sweep CSV output path")
    sw.add_argument("--table", help="optional aligned glyph table output path")
    sw.add_argument("--jobs", type=int, default=1, help="parallel workers")

    cal = sub.add_parser("calibrate", help="fit transition parameters")
    cal.add_argument("--samples", required=True, help="CSV with temp_C,force_N")
    cal.add_argument("--material", required=True, help="initial-guess material name")
    cal.add_argument("--out", required=True, help="fit report output path")

    met = sub.add_parser("metrics", help="motion metrics of a trace")
    met.add_argument("--trace", required=True, help="trace CSV path")
    met.add_argument("--config", required=True, help="config that produced it")
    met.add_argument("--out", help="optional output path (default: stdout)")

    sub.add_parser("presets", help="list the shipped demonstrator presets")

    ex = sub.add_parser("export-config", help="print the expanded config for a preset")
    ex.add_argument("name", help="preset name")
    return p


def _floats(text):
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise ValidationError(f"expected comma-separated numbers, got {text!r}")


def _round6(v):
    if isinstance(v, float):
        return float(f"{v:.6g}")
    return v


def _metrics_doc(rep):
    doc = {
        "closure_pct": rep.closure_pct,
        "reopening_pct": rep.reopening_pct,
        "rom_pct": rep.rom_pct,
        "snap_class": rep.snap_class,
        "closure_temp_C": rep.closure_temp,
        "reopening_temp_C": rep.reopening_temp,
        "onset_temp_C": rep.onset_temp,
    }
    return json.dumps({k: _round6(v) for k, v in doc.items()},
                      indent=2, sort_keys=True) + "\n"


def _cmd_simulate(args):
    cfg = load_config(args.config)
    asm = cfg.assembly()
    trace = run_ramp(asm, cfg.protocol, cfg.solver, backend=args.backend)
    traceio.emit_trace(trace, args.out)
    if args.svg:
        temps = sorted({asm.left.spec.material.T_sw}
                       | ({s.material.T_sw for s in asm.layout.strands}
                          if asm.layout else set()))
        spec = plotting.PlotSpec(switch_temps=tuple(temps))
        plotting.emit_plot(trace, spec, args.svg)
    rep = experiments.compute_metrics(trace, asm, cfg.solver)
    sys.stdout.write(_metrics_doc(rep))
    return 0


def _render_sweep_csv(cells):
    lines = ["a_mm,b_mm,material,outcome"]
    lines += [f"{c.a:g},{c.b:g},{c.material},{c.outcome}" for c in cells]
    return "\n".join(lines) + "\n"


def _render_sweep_table(cells, material):
    lengths = sorted({c.a for c in cells})
    thicknesses = sorted({c.b for c in cells})
    by_key = {(c.a, c.b): GLYPHS[c.outcome] for c in cells}
    colw = 4
    head = "a_mm \\ b_mm |" + "".join(f"{b:>{colw}g}" for b in thicknesses)
    lines = [f"material: {material}", head, "-" * len(head)]
    for a in lengths:
        row = f"{a:>11g} |" + "".join(
            f"{by_key[(a, b)]:>{colw}}" for b in thicknesses
        )
        lines.append(row)
    return "\n".join(lines) + "\n"


def _cmd_sweep(args):
    cfg = load_config(args.config)
    lengths = _floats(args.lengths)
    thicknesses = _floats(args.thicknesses)
    name = cfg.demonstrator.lobe_material.name
    cells = experiments.design_sweep(
        lengths, thicknesses, name, cfg.protocol, cfg.solver, jobs=args.jobs
    )
    traceio.atomic_write_text(args.out, _render_sweep_csv(cells))
    table = _render_sweep_table(cells, name)
    if args.table:
        traceio.atomic_write_text(args.table, table)
    sys.stdout.write(table)
    return 0


def _read_samples(path):
    with open(path, "r", encoding="utf-8") as f:
        lines = [ln.strip() for ln in f if ln.strip()]
    if not lines or lines[0].replace(" ", "") != "temp_C,force_N":
        raise ValidationError("samples CSV must start with header temp_C,force_N")
    samples = []
    for ln in lines[1:]:
        t, fv = ln.split(",")
        samples.append(calibration.ForceSample(T=float(t), F=float(fv)))
    return samples


def _cmd_calibrate(args):
    from . import presets as _presets

    samples = _read_samples(args.samples)
    try:
        init = _presets.material(args.material)
    except KeyError:
        raise ValidationError(f"unknown material {args.material!r}")
    result = calibration.fit_material(samples, init)
    m = result.params
    report = "\n".join(
        [
            f"material = {args.material}",
            f"T_sw_C = {m.T_sw:.6g}",
            f"w_C = {m.w:.6g}",
            f"plateau_N = {calibration.plateau_force(m, 0.40, 0.36):.6g}",
            f"E_rubbery_MPa = {m.E_rubbery:.6g}",
            f"rss_N2 = {result.rss:.6g}",
            f"iterations = {result.iterations}",
            f"converged = {str(result.converged).lower()}",
        ]
    ) + "\n"
    traceio.atomic_write_text(args.out, report)
    sys.stdout.write(report)
    return 0


def _cmd_metrics(args):
    cfg = load_config(args.config)
    asm = cfg.assembly()
    trace = traceio.read_trace(args.trace, x_open=asm.x_open)
    rep = experiments.compute_metrics(trace, asm, cfg.solver)
    doc = _metrics_doc(rep)
    if args.out:
        traceio.atomic_write_text(args.out, doc)
    sys.stdout.write(doc)
    return 0


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "presets":
            for name in experiments.PRESET_NAMES:
                print(name)
            return 0
        if args.command == "export-config":
            asm, proto = experiments.preset(args.name)  # validates the name
            from .config import parse_config

            sys.stdout.write(serialize_config(parse_config(f'preset = "{args.name}"')))
            return 0
        handler = {
            "simulate": _cmd_simulate,
            "sweep": _cmd_sweep,
            "calibrate": _cmd_calibrate,
            "metrics": _cmd_metrics,
        }[args.command]
        return handler(args)
    except SystemExit as e:
        return int(e.code or 0)
    except ConvergenceError as e:
        print(f"avfsim: solver error: {e}", file=sys.stderr)
        return 2
    except (ParseError, ValidationError, UnknownPresetError, AvfsimError) as e:
        print(f"avfsim: error: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"avfsim: i/o error: {e}", file=sys.stderr)
        return 1


def entry():
    sys.exit(main())
