"""Coefficient buildup and conversion of coefficients to body-axis loads.

The database keeps, per aerodynamic coefficient, a clean baseline table
over (alpha, beta) plus separable increment tables for body-rate and
control-surface effects. Total coefficients accumulate as

    longitudinal (CL, CD, Cm):
        C = C0(a, b) + dCq(a, q) * c*q/(2*U) + sum_s dCds(a, d_s) * d_s
    lateral (CY, Cl, Cn):
        C = C0(a, b) + dCp(a, p) * b*p/(2*U) + dCr(a, r) * b*r/(2*U)
            + sum_s dCds(a, d_s) * d_s

with table angles in degrees and deflections converted to radians inside
the products. Span-based nondimensionalization is used for both lateral
rates. Below a usable airspeed the rate and control products are undefined
and evaluation falls back to the baseline terms with a flag.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

from .tables import AeroTable, interpolate_with_flag

LONGITUDINAL = ("CL", "CD", "Cm")
LATERAL = ("CY", "Cl", "Cn")
COEFFICIENTS = LONGITUDINAL + LATERAL

# Increment tables must evaluate to zero at zero perturbation when loaded
# from disk; this is the tolerance for that check.
ZERO_PERTURBATION_TOL = 1e-9


@dataclass(frozen=True)
class FlightCondition:
    """Instantaneous aerodynamic state used for database lookups."""

    alpha: float  # deg
    beta: float  # deg
    airspeed: float  # m/s
    mach: float = 0.0
    p: float = 0.0  # rad/s
    q: float = 0.0
    r: float = 0.0
    deflections: Mapping[str, float] = field(default_factory=dict)  # surface -> deg
    air_density: float = 1.225  # kg/m^3

    def __post_init__(self) -> None:
        if self.airspeed < 0.0:
            raise ValueError(f"airspeed must be non-negative, got {self.airspeed}")
        if self.air_density <= 0.0:
            raise ValueError(f"air density must be positive, got {self.air_density}")


@dataclass(frozen=True)
class CoefficientSet:
    CL: float
    CD: float
    Cm: float
    CY: float
    Cl: float
    Cn: float

    def __post_init__(self) -> None:
        for name in COEFFICIENTS:
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"coefficient {name} is not finite")


@dataclass(frozen=True)
class CoefficientTables:
    """Baseline plus increment tables for one coefficient."""

    baseline: AeroTable  # over (alpha, beta)
    rate_increments: Mapping[str, AeroTable] = field(default_factory=dict)
    control_increments: Mapping[str, AeroTable] = field(default_factory=dict)


@dataclass(frozen=True)
class LookupFlags:
    """Side information from one buildup evaluation."""

    hover_fallback: bool = False
    clamped: bool = False


@dataclass(frozen=True)
class AeroDatabase:
    """Lookup tables for all six coefficients plus reference geometry."""

    coefficients: Mapping[str, CoefficientTables]
    wingspan: float
    mean_chord: float
    reference_area: float

    def __post_init__(self) -> None:
        missing = [c for c in COEFFICIENTS if c not in self.coefficients]
        if missing:
            raise ValueError(f"database missing coefficient tables: {missing}")
        for name in LONGITUDINAL:
            extra = set(self.coefficients[name].rate_increments) - {"q"}
            if extra:
                raise ValueError(f"{name} carries non-pitch rate increments {sorted(extra)}")
        for name in LATERAL:
            extra = set(self.coefficients[name].rate_increments) - {"p", "r"}
            if extra:
                raise ValueError(f"{name} carries non-lateral rate increments {sorted(extra)}")
        if self.wingspan <= 0 or self.mean_chord <= 0 or self.reference_area <= 0:
            raise ValueError("reference geometry must be positive")

    def validate_zero_perturbation(self) -> None:
        """Check every increment table evaluates to ~0 at zero perturbation.

        Applied when a database is loaded from disk; hand-built in-memory
        databases may carry arbitrary increment tables.
        """
        for cname, tables in self.coefficients.items():
            groups = [
                ("rate", tables.rate_increments),
                ("control", tables.control_increments),
            ]
            for kind, increments in groups:
                for key, table in increments.items():
                    pert_axis = table.axis_names[-1]
                    for a in table.axis_grids[0]:
                        val, _ = interpolate_with_flag(table, {table.axis_names[0]: a, pert_axis: 0.0})
                        if abs(val) > ZERO_PERTURBATION_TOL:
                            raise ValueError(
                                f"{cname} {kind} increment {key!r} evaluates to "
                                f"{val:.3e} at zero perturbation (alpha={a})"
                            )

    def evaluate(self, cond: FlightCondition) -> tuple[CoefficientSet, LookupFlags]:
        """Coefficient buildup with hover fallback and clamp tracking."""
        point = {"alpha": cond.alpha, "beta": cond.beta, "mach": cond.mach}
        clamped = False
        hover = cond.airspeed <= 0.0
        out: dict[str, float] = {}

        if not hover:
            q_hat = self.mean_chord * cond.q / (2.0 * cond.airspeed)
            p_hat = self.wingspan * cond.p / (2.0 * cond.airspeed)
            r_hat = self.wingspan * cond.r / (2.0 * cond.airspeed)

        for name in COEFFICIENTS:
            tables = self.coefficients[name]
            value, c = interpolate_with_flag(tables.baseline, point)
            clamped = clamped or c
            if hover:
                out[name] = value
                continue
            if name in LONGITUDINAL:
                rate_terms = (("q", cond.q, q_hat),)
            else:
                rate_terms = (("p", cond.p, p_hat), ("r", cond.r, r_hat))
            for axis, rate, nondim in rate_terms:
                table = tables.rate_increments.get(axis)
                if table is None:
                    continue
                inc, c = interpolate_with_flag(
                    table, {"alpha": cond.alpha, f"{axis}_hat": rate}
                )
                clamped = clamped or c
                value += inc * nondim
            for surface, defl_deg in cond.deflections.items():
                table = tables.control_increments.get(surface)
                if table is None:
                    continue
                inc, c = interpolate_with_flag(
                    table, {"alpha": cond.alpha, f"delta_{surface}": defl_deg}
                )
                clamped = clamped or c
                value += inc * math.radians(defl_deg)
            out[name] = value

        return CoefficientSet(**out), LookupFlags(hover_fallback=hover, clamped=clamped)


def coefficient_buildup(db: AeroDatabase, cond: FlightCondition) -> CoefficientSet:
    """Total coefficients for the given flight condition."""
    return db.evaluate(cond)[0]


def coefficients_to_forces(coeffs: CoefficientSet, cond: FlightCondition, params) -> "ForcesMoments":
    """Convert coefficients to body-axis forces and moments.

    Lift, drag, and side force rotate from wind axes into body axes via
    alpha and beta; moments scale with the span (roll, yaw) or chord
    (pitch) reference lengths.
    """
    from ..vehicle import ForcesMoments

    qbar = 0.5 * cond.air_density * cond.airspeed * cond.airspeed
    s = params.wing_area
    lift = qbar * s * coeffs.CL
    drag = qbar * s * coeffs.CD
    side = qbar * s * coeffs.CY

    a = math.radians(cond.alpha)
    b = math.radians(cond.beta)
    ca, sa = math.cos(a), math.sin(a)
    cb, sb = math.cos(b), math.sin(b)

    # Wind-to-body rotation applied to (-D, Y, -L).
    fx = -ca * cb * drag - ca * sb * side + sa * lift
    fy = -sb * drag + cb * side
    fz = -sa * cb * drag - sa * sb * side - ca * lift

    l_mom = qbar * s * params.wingspan * coeffs.Cl
    m_mom = qbar * s * params.mean_chord * coeffs.Cm
    n_mom = qbar * s * params.wingspan * coeffs.Cn
    return ForcesMoments(fx, fy, fz, l_mom, m_mom, n_mom)
