"""Phenomenological one-way shape-memory constitutive model.

A single scalar internal variable, the frozen fraction ``phi(T)``, drives
everything: the temperature-dependent modulus, the strain retained after a
programming cycle, and the force a programmed sample exerts against fixed
grips while heated through its transition.  All functions here are pure and
cheap; they are evaluated millions of times by the ramp solver.

Units: temperatures in degC, moduli in MPa, areas in mm^2, forces in N
(MPa * mm^2 = N), strains dimensionless.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .errors import DomainError, OverstrainError, ProtocolError

__all__ = [
    "MaterialParams",
    "ProgrammedState",
    "CyclePhase",
    "frozen_fraction",
    "modulus",
    "program",
    "retained_strain",
    "release_ratio",
    "blocked_recovery_force",
]


@dataclass(frozen=True)
class MaterialParams:
    """Constitutive constants of one shape-memory material.

    Attributes
    ----------
    name : str
        Label used in configs and reports.
    E_glassy, E_rubbery : float
        Moduli (MPa) far below / far above the transition.
    T_sw : float
        Switching temperature (degC), the midpoint of the transition.
    w : float
        Transition half-width (degC) of the logistic frozen fraction.
    R_f : float
        Shape fixity ratio: fraction of applied strain retained after
        unloading, in (0, 1].
    R_r : float
        Shape recovery ratio: fraction of programmed strain recovered on
        reheating, in (0, 1].
    eps_max : float
        Largest programmable strain magnitude.
    """

    name: str
    E_glassy: float
    E_rubbery: float
    T_sw: float
    w: float
    R_f: float
    R_r: float
    eps_max: float

    def __post_init__(self):
        # equal moduli are allowed as a degenerate (transition-free) case
        if not (self.E_glassy >= self.E_rubbery > 0.0):
            raise ValueError(
                f"{self.name}: need E_glassy >= E_rubbery > 0, "
                f"got {self.E_glassy}, {self.E_rubbery}"
            )
        if self.w <= 0.0:
            raise ValueError(f"{self.name}: transition half-width must be positive")
        if not (0.0 < self.R_f <= 1.0 and 0.0 < self.R_r <= 1.0):
            raise ValueError(f"{self.name}: R_f and R_r must lie in (0, 1]")
        if self.eps_max <= 0.0:
            raise ValueError(f"{self.name}: eps_max must be positive")


@dataclass(frozen=True)
class ProgrammedState:
    """Result of one programming cycle (deform, cool, unload).

    ``eps_retained_at_fix`` is the strain left after elastic springback on
    unloading; ``phi_fix`` caches the frozen fraction at the fixing
    temperature so later release ratios need no re-evaluation.
    """

    eps_prog: float
    T_fix: float
    phi_fix: float
    eps_retained_at_fix: float


class CyclePhase(Enum):
    """Phases of a one-way shape-memory cycle, in protocol order."""

    DEFORMATION = 1
    COOLING_FIXING = 2
    UNLOADING = 3
    RECOVERY = 4


def frozen_fraction(T, p):
    """Fraction of the network still in the glassy (locked) state at ``T``.

    Logistic in temperature: 1/(1 + exp((T - T_sw)/w)).  Strictly
    decreasing, equals 1/2 at the switching temperature, and is a total
    function of T.
    """
    z = (T - p.T_sw) / p.w
    # exp overflow guard; the asymptotes are exact 0/1 limits anyway
    if z > 700.0:
        return 0.0
    if z < -700.0:
        return 1.0
    return 1.0 / (1.0 + math.exp(z))


def modulus(T, p):
    """Temperature-dependent modulus (MPa), linear mix over the frozen fraction."""
    return p.E_rubbery + (p.E_glassy - p.E_rubbery) * frozen_fraction(T, p)


def program(p, eps_applied, T_hot, T_fix):
    """Run one programming cycle and return the resulting ``ProgrammedState``.

    The sample is deformed to ``eps_applied`` above the transition
    (``T_hot``), cooled to ``T_fix`` under load, then unloaded.  Imperfect
    fixity springs the retained strain back to ``R_f * eps_applied``.

    Raises
    ------
    OverstrainError
        If ``|eps_applied|`` exceeds the programmable limit.
    ProtocolError
        If the temperatures do not bracket the transition
        (need T_hot > T_sw + w and T_fix < T_sw - w).
    """
    if abs(eps_applied) > p.eps_max:
        raise OverstrainError(
            f"{p.name}: |eps|={abs(eps_applied):g} exceeds eps_max={p.eps_max:g}"
        )
    if not (T_hot > p.T_sw + p.w):
        raise ProtocolError(
            f"{p.name}: deformation temperature {T_hot:g} degC is not above "
            f"the transition (need > {p.T_sw + p.w:g})"
        )
    if not (T_fix < p.T_sw - p.w):
        raise ProtocolError(
            f"{p.name}: fixing temperature {T_fix:g} degC is not below "
            f"the transition (need < {p.T_sw - p.w:g})"
        )
    return ProgrammedState(
        eps_prog=eps_applied,
        T_fix=T_fix,
        phi_fix=frozen_fraction(T_fix, p),
        eps_retained_at_fix=p.R_f * eps_applied,
    )


def _check_domain(T, s, p):
    if T < s.T_fix:
        raise DomainError(
            f"{p.name}: recovery model undefined below the fixing "
            f"temperature ({T:g} < {s.T_fix:g} degC)"
        )


def retained_strain(T, s, p):
    """Strain still held by the sample at ``T`` during free recovery.

    Interpolates between the unloaded value ``R_f * eps_prog`` (all release
    frozen) and the permanent residual ``(1 - R_r) * eps_prog`` as the
    frozen fraction melts away.  Clamped so rounding never produces a value
    outside those bounds; monotone non-increasing in T.
    """
    _check_domain(T, s, p)
    e = s.eps_prog
    residual = (1.0 - p.R_r) * e
    span = (p.R_f - (1.0 - p.R_r)) * e
    raw = residual + span * frozen_fraction(T, p) / s.phi_fix
    lo, hi = sorted((residual, p.R_f * e))
    return min(max(raw, lo), hi)


def release_ratio(T, s, p):
    """Fraction of the recoverable strain released by temperature ``T``.

    0 at the fixing temperature, 1 once recovery is complete; used by the
    mechanics layer to drive the lobe bias.  Monotone non-decreasing.
    """
    _check_domain(T, s, p)
    e = s.eps_prog
    span = (p.R_f - (1.0 - p.R_r)) * e
    rho = (p.R_f * e - retained_strain(T, s, p)) / span
    return min(max(rho, 0.0), 1.0)


def blocked_recovery_force(T, s, p, A):
    """Force (N) a programmed sample exerts against fixed grips at ``T``.

    The grips hold the sample at its programmed length, so the stress is
    the current modulus times the strain the sample would have released if
    free: F = E(T) * A * (R_f*eps_prog - eps_retained(T)).  Zero at the
    fixing temperature; plateaus at E_rubbery * A * (R_f - (1-R_r)) * eps_prog
    once recovery is complete.
    """
    _check_domain(T, s, p)
    if A <= 0.0:
        raise ValueError(f"cross-section must be positive, got {A:g}")
    released = p.R_f * s.eps_prog - retained_strain(T, s, p)
    return modulus(T, p) * A * released
