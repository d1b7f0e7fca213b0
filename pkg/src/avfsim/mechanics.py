"""Structural elements: bistable lobes, contraction strands, assemblies.

Each trap lobe is reduced to one curvature coordinate q (-1 = programmed
open / inverted, +1 = permanent closed).  Its potential combines a
double-well inversion barrier with a recovery bias whose rest position
moves from the open to the closed shape as the programmed strain releases:

    V(q, T) = k(T) (q^2 - 1)^2 + h(T)/2 (q - c(T))^2

    k(T) = k_ref E(T)/E_glassy            inversion barrier scale
    h(T) = beta k_ref rho_q(T) E(T)/E_glassy   recovery spring stiffness
    c(T) = -1 + 2 rho_q(T) tau            recovery spring rest position

where rho_q is the kinematic release fraction (see below) and
tau = k_ref/(k_ref + k_mount) is the fraction of the recovery rotation
that reaches the lobe instead of distorting the compliant mount.  The
spring-to-barrier ratio h/(4k) = beta rho_q / 4 decides the character of
the motion: above 1 the landscape is single-welled and the lobe tracks its
release smoothly, below 1 the open well persists until it vanishes at a
fold and the lobe snaps.

Strands are linear contraction actuators attached so that closing
stretches them; their stored energy is quadratic in the strand strain with
the full temperature-dependent modulus.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from . import presets
from .errors import ConfigError
from .materials import (
    MaterialParams,
    ProgrammedState,
    frozen_fraction,
    modulus,
    program,
    retained_strain,
)

__all__ = [
    "LobeSpec",
    "BistableLobeElement",
    "StrandSpec",
    "LayoutKind",
    "StrandLayout",
    "AvfAssembly",
    "DemonstratorConfig",
    "lobe_energy",
    "strand_energy",
    "tip_displacement",
    "total_energy",
    "build_assembly",
    "double_well_energy",
    "double_well_grad",
    "stiffness_scale",
    "C_GEOM",
    "L_NORM_MM",
    "K_MOUNT_MJ",
    "GAMMA_DEFAULT",
]

# Geometry-to-stiffness normalization: chosen so a 60 x 2 mm lobe of the
# 300 MPa glassy material has k_ref = 10 mJ.
C_GEOM = 1600.0 / 9.0
L_NORM_MM = 40.0

# Mount/midrib compliance (mJ).  Gives the model an absolute energy scale:
# floppy lobes (small k_ref) lose most of their recovery rotation to the
# mount and cannot finish closing.
K_MOUNT_MJ = 0.22

# Geometric stretch of a colinear strand per unit closing coordinate.
GAMMA_DEFAULT = 0.004

# Per-layout strand geometry: (count_weight, lever, length_mm).  The lever
# scales the colinear stretch coefficient; the diamond arrangement couples
# each of its four strands at an angle, the cross adds one nearly
# transverse strand to the single colinear one.
_DIAMOND_ASPECT = 0.5  # width : height = 1 : 2, fixed
_DIAMOND_HEIGHT_MM = 30.0
_DIAMOND_SIDE_MM = 0.5 * _DIAMOND_HEIGHT_MM * math.sqrt(
    1.0 + _DIAMOND_ASPECT * _DIAMOND_ASPECT
)
_STRAND_LENGTH_MM = 30.0
_CROSS_TRANSVERSE_LEVER = 0.30
_DIAMOND_LEVER = 0.62


class LayoutKind(Enum):
    SINGLE_STRAND = "single"
    CROSS_SHAPE = "cross"
    DIAMOND_SHAPE = "diamond"


@dataclass(frozen=True)
class LobeSpec:
    """Geometry and material of one doubly curved lobe."""

    a: float  # horizontal lobe length, mm
    b: float  # lobe thickness, mm
    R1: float  # principal radius, mm
    R2: float  # principal radius, mm
    material: MaterialParams
    programmed: ProgrammedState

    def __post_init__(self):
        if min(self.a, self.b, self.R1, self.R2) <= 0.0:
            raise ConfigError(
                f"lobe dimensions must be positive: a={self.a}, b={self.b}, "
                f"R1={self.R1}, R2={self.R2}"
            )

    @property
    def gaussian_curvature(self):
        """Product of the principal curvatures (1/mm^2); positive = dome."""
        return 1.0 / (self.R1 * self.R2)


@dataclass(frozen=True)
class BistableLobeElement:
    """One-degree-of-freedom reduction of a bistable lobe."""

    k_ref: float  # barrier stiffness scale, mJ
    beta: float  # recovery bias gain
    spec: LobeSpec
    k_mount: float = K_MOUNT_MJ

    @property
    def mount_transmission(self):
        return self.k_ref / (self.k_ref + self.k_mount)

    def release_fraction(self, T):
        """Kinematic release fraction rho_q(T) = 1 - (phi/phi_fix)^2.

        The quadratic mapping front-loads the tip response: small early
        strain release already bends the slender lobe visibly, while the
        last few percent of release barely move it.
        """
        s = self.spec.programmed
        phi_hat = frozen_fraction(T, self.spec.material) / s.phi_fix
        phi_hat = min(phi_hat, 1.0)
        return 1.0 - phi_hat * phi_hat

    def coefficients(self, T):
        """Return (k, h, c): barrier scale, spring stiffness, spring center."""
        m = self.spec.material
        e_rel = modulus(T, m) / m.E_glassy
        rho_q = self.release_fraction(T)
        k = self.k_ref * e_rel
        h = self.beta * self.k_ref * rho_q * e_rel
        c = -1.0 + 2.0 * rho_q * self.mount_transmission
        return k, h, c


@dataclass(frozen=True)
class StrandSpec:
    """One group of identical contraction strands.

    ``gamma`` is the effective stretch coefficient per unit closing for
    this group (layout lever already applied); ``count_weight`` the number
    of parallel strands it represents.
    """

    L0: float  # unprogrammed length, mm
    A_s: float  # cross-section, mm^2
    material: MaterialParams
    programmed: ProgrammedState
    gamma: float
    count_weight: float = 1.0

    def __post_init__(self):
        if self.L0 <= 0.0 or self.A_s <= 0.0:
            raise ConfigError(
                f"strand needs positive length and cross-section, "
                f"got L0={self.L0}, A_s={self.A_s}"
            )

    def strain_coefficients(self, T):
        """Strand strain as an affine function of q: eps_s = a0 + b1*q."""
        s = self.programmed
        stretch = 1.0 + self.material.R_f * s.eps_prog
        L_nat = 1.0 + retained_strain(T, s, self.material)
        n = stretch / L_nat
        b1 = 0.5 * n * self.gamma
        a0 = n * (1.0 + 0.5 * self.gamma) - 1.0
        return a0, b1

    def energy_scale(self, T):
        """Half E(T) * A_s * L0 (mJ per unit strain squared, one strand)."""
        return 0.5 * modulus(T, self.material) * self.A_s * self.L0


@dataclass(frozen=True)
class StrandLayout:
    """Named strand arrangement with its per-group specs."""

    kind: LayoutKind
    strands: tuple[StrandSpec, ...]

    @property
    def strand_count(self):
        return int(round(sum(s.count_weight for s in self.strands)))


@dataclass(frozen=True)
class AvfAssembly:
    """Two lobes joined by a midrib, optionally rigged with strands."""

    left: BistableLobeElement
    right: BistableLobeElement
    layout: StrandLayout | None = None
    midrib_rigid: bool = True

    @property
    def x_open(self):
        """Open-state tip half-gap (mm): circular-segment sagitta of the lobe."""
        spec = self.left.spec
        return spec.a * spec.a / (8.0 * spec.R1)

    def lobes(self):
        return (self.left, self.right)


def stiffness_scale(a, b, E_glassy, c_geom=C_GEOM, L_norm=L_NORM_MM):
    """Barrier stiffness scale k_ref = c_geom * E_glassy * a * b^3 / L_norm^4."""
    return c_geom * E_glassy * a * b**3 / L_norm**4


def double_well_energy(q, k, m):
    """Symmetric double well with a linear tilt: k (q^2-1)^2 - m q."""
    d = q * q - 1.0
    return k * d * d - m * q


def double_well_grad(q, k, m):
    """Derivative of :func:`double_well_energy` in q."""
    return 4.0 * k * q * (q * q - 1.0) - m


def lobe_energy(q, T, lobe):
    """Potential energy (mJ) of one lobe element at coordinate q."""
    k, h, c = lobe.coefficients(T)
    d = q * q - 1.0
    dq = q - c
    return k * d * d + 0.5 * h * dq * dq


def strand_energy(q, T, strand):
    """Stored elastic energy (mJ) of one strand group at coordinate q.

    Current length L(q) = L0 (1 + R_f eps_prog)(1 + gamma (q+1)/2) against
    the temperature-dependent natural length L0 (1 + eps_retained(T)); the
    energy is count_weight * 1/2 E(T) A_s L0 eps_s^2 and is never negative.
    """
    a0, b1 = strand.strain_coefficients(T)
    eps_s = a0 + b1 * q
    return strand.count_weight * strand.energy_scale(T) * eps_s * eps_s


def tip_displacement(q, asm):
    """Tip distance (mm) from the closed reference line: x_open (1 - q)/2."""
    return asm.x_open * (1.0 - q) / 2.0


def total_energy(qL, qR, T, asm):
    """Assembly energy: both lobes plus every strand group on each lobe."""
    v = lobe_energy(qL, T, asm.left) + lobe_energy(qR, T, asm.right)
    if asm.layout is not None:
        for s in asm.layout.strands:
            v += strand_energy(qL, T, s) + strand_energy(qR, T, s)
    return v


@dataclass(frozen=True)
class DemonstratorConfig:
    """Everything needed to build one demonstrator assembly."""

    lobe_material: MaterialParams
    length_mm: float = 60.0
    thickness_mm: float = 2.0
    R1_mm: float = 40.0
    R2_mm: float = 110.0
    layout: LayoutKind | None = None
    strand_material: MaterialParams | None = None
    strand_cross_section_mm2: float = 0.36
    strand_prestrain: float = presets.STRAND_PRESTRAIN
    gamma: float = GAMMA_DEFAULT
    beta: float | None = None  # default: per-material registry value
    c_geom: float = C_GEOM
    k_mount: float = K_MOUNT_MJ
    asymmetry: float = 0.0  # relative right/left k_ref mismatch
    program_T_fix: float = presets.PROGRAM_T_FIX
    layout_overrides: dict = field(default_factory=dict)


def _layout_groups(kind, overrides):
    """(count_weight, lever, length_mm) rows for a layout kind."""
    table = {
        LayoutKind.SINGLE_STRAND: [(1.0, 1.0, _STRAND_LENGTH_MM)],
        LayoutKind.CROSS_SHAPE: [
            (1.0, 1.0, _STRAND_LENGTH_MM),
            (1.0, _CROSS_TRANSVERSE_LEVER, _STRAND_LENGTH_MM),
        ],
        LayoutKind.DIAMOND_SHAPE: [(4.0, _DIAMOND_LEVER, _DIAMOND_SIDE_MM)],
    }
    groups = table[kind]
    if kind in overrides:
        groups = overrides[kind]
    return groups


def _program_lobe(mat, T_fix):
    T_hot = mat.T_sw + 10.0 * mat.w
    return program(mat, presets.LOBE_PROGRAM_STRAIN, T_hot, T_fix)


def build_assembly(cfg):
    """Construct an :class:`AvfAssembly` from a demonstrator configuration.

    Raises :class:`ConfigError` on non-positive dimensions or a layout that
    names no strand material.
    """
    if cfg.thickness_mm <= 0.0 or cfg.length_mm <= 0.0:
        raise ConfigError(
            f"lobe geometry must be positive, got a={cfg.length_mm}, "
            f"b={cfg.thickness_mm}"
        )
    mat = cfg.lobe_material
    programmed = _program_lobe(mat, cfg.program_T_fix)
    spec = LobeSpec(
        a=cfg.length_mm,
        b=cfg.thickness_mm,
        R1=cfg.R1_mm,
        R2=cfg.R2_mm,
        material=mat,
        programmed=programmed,
    )
    k_ref = stiffness_scale(cfg.length_mm, cfg.thickness_mm, mat.E_glassy, cfg.c_geom)
    beta = presets.bias_gain(mat.name) if cfg.beta is None else cfg.beta
    left = BistableLobeElement(k_ref=k_ref, beta=beta, spec=spec, k_mount=cfg.k_mount)
    if cfg.asymmetry:
        right = BistableLobeElement(
            k_ref=k_ref * (1.0 + cfg.asymmetry),
            beta=beta,
            spec=spec,
            k_mount=cfg.k_mount,
        )
    else:
        right = left

    layout = None
    if cfg.layout is not None:
        smat = cfg.strand_material
        if smat is None:
            raise ConfigError("layout given but no strand material named")
        sprog = program(
            smat,
            cfg.strand_prestrain,
            smat.T_sw + 10.0 * smat.w,
            cfg.program_T_fix,
        )
        strands = tuple(
            StrandSpec(
                L0=length,
                A_s=cfg.strand_cross_section_mm2,
                material=smat,
                programmed=sprog,
                gamma=cfg.gamma * lever,
                count_weight=count,
            )
            for count, lever, length in _layout_groups(cfg.layout, cfg.layout_overrides)
        )
        layout = StrandLayout(kind=cfg.layout, strands=strands)

    return AvfAssembly(left=left, right=right, layout=layout)
