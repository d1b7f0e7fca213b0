"""Canonical run configuration: TOML schema, validation, serialization.

One document describes a full run: material registry overrides, the
demonstrator (geometry, layout, strands), the thermal protocol and solver
settings.  Unknown keys are rejected with their full key path; omitted
protocol/solver fields take the shipped defaults.  A top-level
``preset = "<name>"`` expands to the named demonstrator before explicit
sections are applied.

Unit conventions are part of the key names (``length_mm``, ``T_sw_C``)
to keep documents self-describing.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

try:
    import tomllib as _toml
except ImportError:  # Python < 3.11
    import tomli as _toml

from . import presets
from .errors import ParseError, UnknownPresetError, ValidationError
from .materials import MaterialParams
from .mechanics import (
    C_GEOM,
    GAMMA_DEFAULT,
    K_MOUNT_MJ,
    DemonstratorConfig,
    LayoutKind,
    build_assembly,
)
from .solver import SolverSettings, ThermalProtocol

__all__ = ["RunConfig", "parse_config", "serialize_config", "load_config"]

_LAYOUTS = {
    "none": None,
    "single": LayoutKind.SINGLE_STRAND,
    "cross": LayoutKind.CROSS_SHAPE,
    "diamond": LayoutKind.DIAMOND_SHAPE,
}
_LAYOUT_NAMES = {v: k for k, v in _LAYOUTS.items()}

_PRESET_LAYOUTS = {
    "L20_mono": ("L20", None, False),
    "SME25_mono": ("SME25", None, False),
    "bidir_single": ("L20", LayoutKind.SINGLE_STRAND, True),
    "bidir_cross": ("L20", LayoutKind.CROSS_SHAPE, True),
    "bidir_diamond": ("L20", LayoutKind.DIAMOND_SHAPE, True),
}


@dataclass(frozen=True)
class RunConfig:
    """Validated run description; build the assembly with :meth:`assembly`."""

    materials: dict
    demonstrator: DemonstratorConfig
    protocol: ThermalProtocol
    solver: SolverSettings
    outputs: dict = field(default_factory=dict)

    def assembly(self):
        return build_assembly(self.demonstrator)


def _require(cond, msg, path):
    if not cond:
        raise ValidationError(msg, key_path=path)


def _num(table, key, path, default=None, where=None):
    if key not in table:
        if default is None:
            raise ValidationError("required key missing", key_path=f"{path}.{key}")
        return default
    v = table.pop(key)
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ValidationError("expected a number", key_path=f"{path}.{key}")
    v = float(v)
    if where is not None and not where(v):
        raise ValidationError(f"value {v:g} out of range", key_path=f"{path}.{key}")
    return v


def _str(table, key, path, default=None, choices=None):
    if key not in table:
        if default is None:
            raise ValidationError("required key missing", key_path=f"{path}.{key}")
        return default
    v = table.pop(key)
    if not isinstance(v, str):
        raise ValidationError("expected a string", key_path=f"{path}.{key}")
    if choices is not None and v not in choices:
        raise ValidationError(
            f"must be one of {sorted(choices)}, got {v!r}", key_path=f"{path}.{key}"
        )
    return v


def _reject_unknown(table, path):
    if table:
        key = sorted(table)[0]
        raise ValidationError("unknown key", key_path=f"{path}.{key}")


def _parse_material(name, table, path):
    try:
        return MaterialParams(
            name=name,
            E_glassy=_num(table, "E_glassy_MPa", path),
            E_rubbery=_num(table, "E_rubbery_MPa", path),
            T_sw=_num(table, "T_sw_C", path),
            w=_num(table, "w_C", path),
            R_f=_num(table, "R_f", path),
            R_r=_num(table, "R_r", path),
            eps_max=_num(table, "eps_max", path),
        )
    except ValueError as e:
        raise ValidationError(str(e), key_path=path) from e
    finally:
        _reject_unknown(table, path)


def parse_config(text):
    """Parse and validate a TOML run configuration.

    Raises :class:`ParseError` on malformed TOML and
    :class:`ValidationError` (with a key path) on schema violations.
    """
    try:
        doc = _toml.loads(text)
    except _toml.TOMLDecodeError as e:
        raise ParseError(f"malformed config document: {e}") from e

    materials = dict(presets.MATERIALS)
    gains = dict(presets.BIAS_GAINS)

    mat_tables = doc.pop("materials", {})
    if not isinstance(mat_tables, dict):
        raise ValidationError("expected a table of tables", key_path="materials")
    for name, table in sorted(mat_tables.items()):
        path = f"materials.{name}"
        if not isinstance(table, dict):
            raise ValidationError("expected a table", key_path=path)
        table = dict(table)
        beta = table.pop("beta", None)
        materials[name] = _parse_material(name, table, path)
        if beta is not None:
            if isinstance(beta, bool) or not isinstance(beta, (int, float)):
                raise ValidationError("expected a number", key_path=f"{path}.beta")
            gains[name] = float(beta)

    # Demonstrator defaults, possibly seeded from a preset.
    demo_defaults = {
        "lobe_material": "L20",
        "layout": None,
        "strand_form": True,
        "strand_material": None,
    }
    preset_name = doc.pop("preset", None)
    if preset_name is not None:
        if not isinstance(preset_name, str) or preset_name not in _PRESET_LAYOUTS:
            raise UnknownPresetError(
                f"unknown preset {preset_name!r}; "
                f"known: {', '.join(sorted(_PRESET_LAYOUTS))}"
            )
        mat, kind, strands = _PRESET_LAYOUTS[preset_name]
        demo_defaults["lobe_material"] = mat
        demo_defaults["layout"] = kind
        if strands:
            demo_defaults["strand_material"] = "SME25"

    demo = dict(doc.pop("demonstrator", {}))
    path = "demonstrator"
    lobe_name = _str(demo, "lobe_material", path, default=demo_defaults["lobe_material"])
    _require(lobe_name in materials, f"unknown material {lobe_name!r}", f"{path}.lobe_material")
    layout_name = _str(
        demo, "layout", path,
        default=_LAYOUT_NAMES[demo_defaults["layout"]] if demo_defaults["layout"] else "none",
        choices=set(_LAYOUTS),
    )
    layout = _LAYOUTS[layout_name]

    strand_tbl = dict(demo.pop("strand", {}))
    spath = f"{path}.strand"
    strand_name = _str(
        strand_tbl, "material", spath, default=demo_defaults["strand_material"] or "SME25"
    )
    _require(
        strand_name in materials, f"unknown material {strand_name!r}", f"{spath}.material"
    )
    strand_form = strand_tbl.pop("strand_form", True)
    if not isinstance(strand_form, bool):
        raise ValidationError("expected a boolean", key_path=f"{spath}.strand_form")
    prestrain = _num(strand_tbl, "prestrain", spath, default=presets.STRAND_PRESTRAIN,
                     where=lambda v: v > 0)
    cross_section = _num(strand_tbl, "cross_section_mm2", spath, default=0.36,
                         where=lambda v: v > 0)
    gamma = _num(strand_tbl, "gamma", spath, default=GAMMA_DEFAULT, where=lambda v: v > 0)
    _reject_unknown(strand_tbl, spath)

    strand_mat = None
    if layout is not None:
        strand_mat = materials[strand_name]
        if strand_form:
            strand_mat = presets.strand_material_for(strand_mat)

    beta = demo.pop("beta", None)
    if beta is not None and (isinstance(beta, bool) or not isinstance(beta, (int, float))):
        raise ValidationError("expected a number", key_path=f"{path}.beta")
    if beta is None:
        beta = gains.get(lobe_name)

    demonstrator = DemonstratorConfig(
        lobe_material=materials[lobe_name],
        length_mm=_num(demo, "length_mm", path, default=60.0, where=lambda v: v > 0),
        thickness_mm=_num(demo, "thickness_mm", path, default=2.0, where=lambda v: v > 0),
        R1_mm=_num(demo, "R1_mm", path, default=40.0, where=lambda v: v > 0),
        R2_mm=_num(demo, "R2_mm", path, default=110.0, where=lambda v: v > 0),
        layout=layout,
        strand_material=strand_mat,
        strand_cross_section_mm2=cross_section,
        strand_prestrain=prestrain,
        gamma=gamma,
        beta=float(beta) if beta is not None else None,
        c_geom=_num(demo, "c_geom", path, default=C_GEOM, where=lambda v: v > 0),
        k_mount=_num(demo, "k_mount_mJ", path, default=K_MOUNT_MJ, where=lambda v: v >= 0),
        asymmetry=_num(demo, "asymmetry", path, default=0.0,
                       where=lambda v: -0.5 <= v <= 0.5),
    )
    _reject_unknown(demo, path)

    proto_tbl = dict(doc.pop("protocol", {}))
    path = "protocol"
    try:
        protocol = ThermalProtocol(
            T_start=_num(proto_tbl, "T_start_C", path, default=20.0),
            T_end=_num(proto_tbl, "T_end_C", path, default=70.0),
            rate=_num(proto_tbl, "rate_C_per_min", path, default=1.0),
            dT_step=_num(proto_tbl, "dT_step_C", path, default=0.05),
        )
    except ValueError as e:
        raise ValidationError(str(e), key_path=path) from e
    _reject_unknown(proto_tbl, path)

    solver_tbl = dict(doc.pop("solver", {}))
    path = "solver"
    try:
        solver = SolverSettings(
            grad_tol=_num(solver_tbl, "grad_tol", path, default=1e-10),
            max_iter=int(_num(solver_tbl, "max_iter", path, default=100)),
            q_scan_lo=_num(solver_tbl, "q_scan_lo", path, default=-1.5),
            q_scan_hi=_num(solver_tbl, "q_scan_hi", path, default=1.5),
            q_scan_points=int(_num(solver_tbl, "q_scan_points", path, default=2001)),
            snap_window_s=_num(solver_tbl, "snap_window_s", path, default=0.04),
            snap_fraction=_num(solver_tbl, "snap_fraction", path, default=0.3),
        )
    except ValueError as e:
        raise ValidationError(str(e), key_path=path) from e
    _reject_unknown(solver_tbl, path)

    out_tbl = dict(doc.pop("outputs", {}))
    path = "outputs"
    outputs = {}
    for key in ("trace_csv", "svg", "metrics"):
        if key in out_tbl:
            outputs[key] = _str(out_tbl, key, path)
    _reject_unknown(out_tbl, path)

    _reject_unknown(doc, "<root>")
    return RunConfig(
        materials=materials,
        demonstrator=demonstrator,
        protocol=protocol,
        solver=solver,
        outputs=outputs,
    )


def load_config(path):
    with open(path, "r", encoding="utf-8") as f:
        return parse_config(f.read())


def _toml_value(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, int):
        return str(v)
    return '"' + str(v).replace("\\", "\\\\").replace('"', '\\"') + '"'


def serialize_config(cfg):
    """Canonical TOML for a RunConfig; parse(serialize(cfg)) == cfg."""
    d = cfg.demonstrator
    lines = []
    for name in sorted(cfg.materials):
        m = cfg.materials[name]
        lines += [f"[materials.{name}]"]
        lines += [
            f"E_glassy_MPa = {_toml_value(m.E_glassy)}",
            f"E_rubbery_MPa = {_toml_value(m.E_rubbery)}",
            f"T_sw_C = {_toml_value(m.T_sw)}",
            f"w_C = {_toml_value(m.w)}",
            f"R_f = {_toml_value(m.R_f)}",
            f"R_r = {_toml_value(m.R_r)}",
            f"eps_max = {_toml_value(m.eps_max)}",
            "",
        ]
    lines += [
        "[demonstrator]",
        f"lobe_material = {_toml_value(d.lobe_material.name)}",
        f"length_mm = {_toml_value(d.length_mm)}",
        f"thickness_mm = {_toml_value(d.thickness_mm)}",
        f"R1_mm = {_toml_value(d.R1_mm)}",
        f"R2_mm = {_toml_value(d.R2_mm)}",
        f"layout = {_toml_value(_LAYOUT_NAMES[d.layout])}",
        f"beta = {_toml_value(d.beta if d.beta is not None else presets.bias_gain(d.lobe_material.name))}",
        f"c_geom = {_toml_value(d.c_geom)}",
        f"k_mount_mJ = {_toml_value(d.k_mount)}",
        f"asymmetry = {_toml_value(d.asymmetry)}",
        "",
        "[demonstrator.strand]",
        f"material = {_toml_value(d.strand_material.name.removesuffix('_strand') if d.strand_material else 'SME25')}",
        f"strand_form = {_toml_value(d.strand_material.name.endswith('_strand') if d.strand_material else True)}",
        f"prestrain = {_toml_value(d.strand_prestrain)}",
        f"cross_section_mm2 = {_toml_value(d.strand_cross_section_mm2)}",
        f"gamma = {_toml_value(d.gamma)}",
        "",
        "[protocol]",
        f"T_start_C = {_toml_value(cfg.protocol.T_start)}",
        f"T_end_C = {_toml_value(cfg.protocol.T_end)}",
        f"rate_C_per_min = {_toml_value(cfg.protocol.rate)}",
        f"dT_step_C = {_toml_value(cfg.protocol.dT_step)}",
        "",
        "[solver]",
        f"grad_tol = {_toml_value(cfg.solver.grad_tol)}",
        f"max_iter = {_toml_value(cfg.solver.max_iter)}",
        f"q_scan_lo = {_toml_value(cfg.solver.q_scan_lo)}",
        f"q_scan_hi = {_toml_value(cfg.solver.q_scan_hi)}",
        f"q_scan_points = {_toml_value(cfg.solver.q_scan_points)}",
        f"snap_window_s = {_toml_value(cfg.solver.snap_window_s)}",
        f"snap_fraction = {_toml_value(cfg.solver.snap_fraction)}",
    ]
    if cfg.outputs:
        lines += ["", "[outputs]"]
        lines += [f"{k} = {_toml_value(v)}" for k, v in sorted(cfg.outputs.items())]
    return "\n".join(lines) + "\n"
