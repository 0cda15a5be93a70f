"""Rotor thrust model: wind-tunnel max-thrust curve and per-rotor loads.

Maximum thrust versus axial inflow speed comes from bench test points and
is interpolated with a natural cubic spline. Thrust scales linearly with
throttle fraction; the tilt angle rotates the thrust axis of the tiltable
(front) rotors between body -z (vertical, 90 deg) and body +x (forward,
0 deg).
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field

from .vehicle import BodyState, ForcesMoments

# Bench measurements: (inflow speed m/s, maximum thrust N) for one rotor.
DEFAULT_THRUST_POINTS: tuple[tuple[float, float], ...] = (
    (0.0, 67.3),
    (5.0, 65.5),
    (10.0, 60.9),
    (15.0, 55.3),
    (20.0, 48.8),
)

# Inflow beyond which spline extrapolation is considered unreliable.
EXTRAPOLATION_WARN_SPEED = 30.0


def _natural_spline_coeffs(
    xs: tuple[float, ...], ys: tuple[float, ...]
) -> list[tuple[float, float, float, float]]:
    """Per-interval (a, b, c, d) cubic coefficients of a natural spline.

    Segment i evaluates as a + b*t + c*t^2 + d*t^3 with t = x - xs[i].
    Second derivatives vanish at both ends. Solved with the standard
    tridiagonal sweep.
    """
    n = len(xs)
    h = [xs[i + 1] - xs[i] for i in range(n - 1)]
    # Thomas algorithm for the interior second-derivative system.
    alpha = [0.0] * n
    for i in range(1, n - 1):
        alpha[i] = 3.0 * ((ys[i + 1] - ys[i]) / h[i] - (ys[i] - ys[i - 1]) / h[i - 1])
    l = [1.0] * n
    mu = [0.0] * n
    z = [0.0] * n
    for i in range(1, n - 1):
        l[i] = 2.0 * (xs[i + 1] - xs[i - 1]) - h[i - 1] * mu[i - 1]
        mu[i] = h[i] / l[i]
        z[i] = (alpha[i] - h[i - 1] * z[i - 1]) / l[i]
    c = [0.0] * n
    for i in range(n - 2, -1, -1):
        c[i] = z[i] - mu[i] * c[i + 1]
    coeffs = []
    for i in range(n - 1):
        b = (ys[i + 1] - ys[i]) / h[i] - h[i] * (c[i + 1] + 2.0 * c[i]) / 3.0
        d = (c[i + 1] - c[i]) / (3.0 * h[i])
        coeffs.append((ys[i], b, c[i], d))
    return coeffs


@dataclass(frozen=True)
class ThrustCurve:
    """Natural cubic spline through (inflow speed, max thrust) knots."""

    knots: tuple[tuple[float, float], ...] = DEFAULT_THRUST_POINTS
    spline_coefficients: tuple[tuple[float, float, float, float], ...] = field(init=False)

    def __post_init__(self) -> None:
        if len(self.knots) < 3:
            raise ValueError("thrust curve needs at least 3 knots")
        xs = tuple(k[0] for k in self.knots)
        ys = tuple(k[1] for k in self.knots)
        if any(xs[i + 1] <= xs[i] for i in range(len(xs) - 1)):
            raise ValueError("thrust curve knots must have strictly increasing inflow speeds")
        object.__setattr__(
            self, "spline_coefficients", tuple(_natural_spline_coeffs(xs, ys))
        )

    @classmethod
    def from_json(cls, path: str) -> "ThrustCurve":
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
        return cls(knots=tuple((float(v), float(t)) for v, t in raw["knots"]))

    def to_json(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump({"knots": [list(k) for k in self.knots]}, fh, indent=2)
            fh.write("\n")


def max_thrust(curve: ThrustCurve, inflow: float) -> float:
    """Maximum available thrust (N) at the given axial inflow speed (m/s).

    Evaluates the spline inside the knot range; beyond the last knot the
    final cubic segment extrapolates (logged above EXTRAPOLATION_WARN_SPEED).
    """
    if inflow < 0.0:
        raise ValueError(f"inflow speed must be non-negative, got {inflow}")
    xs = [k[0] for k in curve.knots]
    if inflow > EXTRAPOLATION_WARN_SPEED:
        warnings.warn(
            f"thrust curve extrapolated beyond {EXTRAPOLATION_WARN_SPEED:.0f} m/s tested range",
            RuntimeWarning,
            stacklevel=2,
        )
    # Exact knot hits return the stored value.
    idx = len(xs) - 2
    for i in range(len(xs) - 1):
        if inflow < xs[i + 1]:
            idx = i
            break
    if inflow == xs[idx]:
        return curve.knots[idx][1]
    if inflow == xs[idx + 1]:
        return curve.knots[idx + 1][1]
    a, b, c, d = curve.spline_coefficients[idx]
    t = inflow - xs[idx]
    return a + t * (b + t * (c + t * d))


@dataclass(frozen=True)
class Rotor:
    position: tuple[float, float, float]
    tiltable: bool
    spin_direction: int
    torque_coefficient: float = 0.025  # N*m of reaction torque per N of thrust


@dataclass(frozen=True)
class RotorGeometry:
    """Placement and spin layout of the four lift rotors.

    Default layout is a symmetric 0.6 m x 0.6 m square: front pair
    tiltable, alternating spin directions so reaction torques cancel at
    equal throttle.
    """

    rotors: tuple[Rotor, ...] = (
        Rotor(position=(0.3, -0.3, 0.0), tiltable=True, spin_direction=+1),
        Rotor(position=(0.3, 0.3, 0.0), tiltable=True, spin_direction=-1),
        Rotor(position=(-0.3, -0.3, 0.0), tiltable=False, spin_direction=-1),
        Rotor(position=(-0.3, 0.3, 0.0), tiltable=False, spin_direction=+1),
    )

    def __post_init__(self) -> None:
        if len(self.rotors) != 4:
            raise ValueError(f"expected 4 rotors, got {len(self.rotors)}")
        for rotor in self.rotors:
            if rotor.spin_direction not in (-1, 1):
                raise ValueError("spin_direction must be +1 or -1")
            if not all(math.isfinite(c) for c in rotor.position):
                raise ValueError("rotor position must be finite")

    @classmethod
    def from_json(cls, path: str) -> "RotorGeometry":
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
        rotors = tuple(
            Rotor(
                position=tuple(r["position"]),
                tiltable=bool(r["tiltable"]),
                spin_direction=int(r["spin_direction"]),
                torque_coefficient=float(r.get("torque_coefficient", 0.025)),
            )
            for r in raw["rotors"]
        )
        return cls(rotors=rotors)


@dataclass(frozen=True)
class PropulsionCommand:
    """Normalized per-rotor throttles plus the shared front-rotor tilt."""

    throttles: tuple[float, float, float, float] = (0.0, 0.0, 0.0, 0.0)
    tilt_deg: float = 90.0

    def __post_init__(self) -> None:
        if len(self.throttles) != 4:
            raise ValueError("throttles must have 4 entries")
        for t in self.throttles:
            if not 0.0 <= t <= 1.0:
                raise ValueError(f"throttle {t} outside [0, 1]")
        if not 0.0 <= self.tilt_deg <= 90.0:
            raise ValueError(f"tilt angle {self.tilt_deg} outside [0, 90] deg")


def thrust_axis(tilt_deg: float) -> tuple[float, float, float]:
    """Unit thrust direction in body axes for a tilted rotor.

    90 deg points the thrust up (body -z), 0 deg points it forward
    (body +x).
    """
    tilt = math.radians(tilt_deg)
    return (math.cos(tilt), 0.0, -math.sin(tilt))


def rotor_forces(
    cmd: PropulsionCommand,
    state: BodyState,
    geom: RotorGeometry,
    curve: ThrustCurve,
) -> ForcesMoments:
    """Accumulate body-axis forces and moments from all four rotors.

    Per rotor: thrust = throttle * max_thrust(axial inflow), where the
    axial inflow is the body velocity component along the rotor's thrust
    axis, floored at zero. Moments combine the thrust arm (r x F) with the
    spin-signed aerodynamic reaction torque about the thrust axis.
    """
    return rotor_forces_uvw(cmd, state.u, state.v, state.w, geom, curve)


def rotor_forces_uvw(
    cmd: PropulsionCommand,
    u: float,
    v: float,
    w: float,
    geom: RotorGeometry,
    curve: ThrustCurve,
) -> ForcesMoments:
    """rotor_forces on raw body velocities; the integrator's hot path."""
    fx = fy = fz = 0.0
    lm = mm = nm = 0.0
    tilt_dir = thrust_axis(cmd.tilt_deg)
    vertical = (0.0, 0.0, -1.0)
    for rotor, throttle in zip(geom.rotors, cmd.throttles):
        axis = tilt_dir if rotor.tiltable else vertical
        inflow = max(0.0, u * axis[0] + v * axis[1] + w * axis[2])
        thrust = throttle * max_thrust(curve, inflow)
        tx, ty, tz = thrust * axis[0], thrust * axis[1], thrust * axis[2]
        px, py, pz = rotor.position
        fx += tx
        fy += ty
        fz += tz
        # Thrust arm moment r x F.
        lm += py * tz - pz * ty
        mm += pz * tx - px * tz
        nm += px * ty - py * tx
        # Reaction torque opposes rotor spin, acting along -axis * spin.
        tq = rotor.spin_direction * rotor.torque_coefficient * thrust
        lm -= tq * axis[0]
        mm -= tq * axis[1]
        nm -= tq * axis[2]
    return ForcesMoments(fx, fy, fz, lm, mm, nm)
