"""Shipped material and demonstrator defaults.

The absolute constants below are tuned to reproduce the behavioral targets
of the reference demonstrators (smooth low-temperature lobe closure for
L20, snap-through closure near 45 degC for SME25, strand-driven reopening
beyond 50 degC) and are validated by the acceptance suite; none of them is
a measured quantity.
"""

from __future__ import annotations

import dataclasses

from .materials import MaterialParams

__all__ = [
    "MATERIALS",
    "BIAS_GAINS",
    "material",
    "bias_gain",
    "strand_material_for",
    "LOBE_PROGRAM_STRAIN",
    "STRAND_PRESTRAIN",
    "PROGRAM_T_FIX",
    "STRAND_T_SW_SHIFT",
    "STRAND_W",
]

#: Registry of shipped materials, keyed by name.
MATERIALS = {
    "L20": MaterialParams(
        name="L20",
        E_glassy=300.0,
        E_rubbery=1.0,
        T_sw=38.1,
        w=2.0,
        R_f=0.97,
        R_r=0.99,
        eps_max=2.0,
    ),
    "SME25": MaterialParams(
        name="SME25",
        E_glassy=200.0,
        E_rubbery=25.0,
        T_sw=46.0,
        w=2.0,
        R_f=0.97,
        R_r=0.99,
        eps_max=4.0,
    ),
    # Comparative preset only: higher crosslinker ratio, higher transition,
    # lower recovery force; no demonstrator preset uses it.
    "SME40": MaterialParams(
        name="SME40",
        E_glassy=180.0,
        E_rubbery=15.0,
        T_sw=52.0,
        w=2.0,
        R_f=0.97,
        R_r=0.99,
        eps_max=2.5,
    ),
}

#: Recovery bias gain per material: how effectively released strain turns
#: into curvature-inversion drive.  High gain => the element tracks its
#: release smoothly; low gain => the drive lags and the element snaps
#: through a fold.
BIAS_GAINS = {"L20": 70.0, "SME25": 5.0, "SME40": 5.0}

#: Nominal programming strain for a lobe-level curvature inversion.  The
#: release ratio is scale-invariant in this value; it only has to respect
#: the material's eps_max.
LOBE_PROGRAM_STRAIN = 1.0

#: Strands are programmed with 40% tensile prestrain.
STRAND_PRESTRAIN = 0.40

#: Fixing temperature used when programming lobes and strands (degC).
#: Below every shipped transition band and below the ramp start.
PROGRAM_T_FIX = 15.0

#: Thin strained strips behave differently from the bulk material they are
#: cast from: the stored tensile energy delays and sharpens the onset of
#: contraction, and the drawn network keeps a stiffer rubbery plateau, so
#: the contraction force rises to a plateau instead of spiking
#: mid-transition.  Modeled as a shifted, narrowed, plateau-stiffened copy
#: of the base material.
STRAND_T_SW_SHIFT = 7.0
STRAND_W = 0.7
STRAND_E_RUBBERY = 150.0


def material(name):
    """Look up a shipped material by name (KeyError on unknown)."""
    return MATERIALS[name]


def bias_gain(name):
    """Recovery bias gain for a shipped material (default 5.0)."""
    return BIAS_GAINS.get(name, 5.0)


def strand_material_for(base):
    """Derive the strand-form transition parameters from a bulk material."""
    return dataclasses.replace(
        base,
        name=base.name + "_strand",
        T_sw=base.T_sw + STRAND_T_SW_SHIFT,
        w=STRAND_W,
        E_rubbery=STRAND_E_RUBBERY,
    )
