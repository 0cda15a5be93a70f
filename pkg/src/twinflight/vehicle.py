"""Rigid-body flight dynamics of a tilting-rotor eVTOL airframe.

Body-frame 6-DOF equations with the roll/yaw inertia cross-coupling term
Ixz, Euler-angle attitude kinematics, and tilt-based flight-mode
classification. All functions here are pure and safe to call from any
thread.

Axes: body x forward, y right, z down. World frame is NED (z down).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, fields
from enum import Enum

GRAVITY = 9.80665

# Margin (rad) kept from theta = +/- pi/2 before dynamics refuse to evaluate.
GIMBAL_LOCK_MARGIN = 1e-6


class GimbalLockError(ValueError):
    """Pitch angle too close to +/-90 deg for Euler-angle kinematics."""


def _wrap_pi(angle: float) -> float:
    """Wrap an angle into (-pi, pi]."""
    wrapped = math.fmod(angle + math.pi, 2.0 * math.pi)
    if wrapped <= 0.0:
        wrapped += 2.0 * math.pi
    return wrapped - math.pi


@dataclass(frozen=True)
class VehicleParams:
    """Mass, inertia, and reference geometry of the airframe.

    Defaults are the 11.8 kg tilting-rotor testbed this package models.
    Inertia products other than Ixz vanish for its symmetric layout.
    """

    mass: float = 11.828
    gravity: float = GRAVITY
    Ixx: float = 0.7816
    Iyy: float = 2.073
    Izz: float = 1.423
    Ixz: float = -0.1564
    Ixy: float = 0.0
    Iyz: float = 0.0
    wing_area: float = 0.8544
    wingspan: float = 2.0
    mean_chord: float = 0.2995
    cruise_speed: float = 25.0

    def __post_init__(self) -> None:
        if self.mass <= 0.0:
            raise ValueError(f"mass must be positive, got {self.mass}")
        for name in ("Ixx", "Iyy", "Izz"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        # Positive-definiteness of the full inertia tensor via leading minors.
        # With Ixy = Iyz = 0 this reduces to Ixx*Izz > Ixz**2.
        i = self.inertia_tensor()
        m1 = i[0][0]
        m2 = i[0][0] * i[1][1] - i[0][1] ** 2
        m3 = (
            i[0][0] * (i[1][1] * i[2][2] - i[1][2] ** 2)
            - i[0][1] * (i[0][1] * i[2][2] - i[1][2] * i[0][2])
            + i[0][2] * (i[0][1] * i[1][2] - i[1][1] * i[0][2])
        )
        if m1 <= 0.0 or m2 <= 0.0 or m3 <= 0.0:
            raise ValueError("inertia tensor is not positive definite")

    def inertia_tensor(self) -> list[list[float]]:
        """3x3 inertia tensor with negative products on the off-diagonal."""
        return [
            [self.Ixx, -self.Ixy, -self.Ixz],
            [-self.Ixy, self.Iyy, -self.Iyz],
            [-self.Ixz, -self.Iyz, self.Izz],
        ]

    @classmethod
    def from_json(cls, path: str) -> "VehicleParams":
        """Load parameters from a JSON document (SI units, field names as-is)."""
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
        known = {f.name for f in fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise ValueError(f"unknown vehicle parameter(s) in {path}: {sorted(unknown)}")
        return cls(**raw)

    def to_json(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump({f.name: getattr(self, f.name) for f in fields(self)}, fh, indent=2)
            fh.write("\n")


class FlightMode(Enum):
    VTOL = "vtol"
    TRANSITION = "transition"
    CRUISE = "cruise"


def flight_mode(tilt_deg: float) -> FlightMode:
    """Classify flight mode from the front-rotor tilt angle.

    90 deg (rotors vertical) is VTOL, 0 deg (rotors forward) is cruise,
    anything strictly between is transition.
    """
    if not 0.0 <= tilt_deg <= 90.0:
        raise ValueError(f"tilt angle must be in [0, 90] deg, got {tilt_deg}")
    if tilt_deg == 90.0:
        return FlightMode.VTOL
    if tilt_deg == 0.0:
        return FlightMode.CRUISE
    return FlightMode.TRANSITION


@dataclass(frozen=True)
class BodyState:
    """Full rigid-body state: body velocities, rates, attitude, NED position."""

    u: float = 0.0
    v: float = 0.0
    w: float = 0.0
    p: float = 0.0
    q: float = 0.0
    r: float = 0.0
    phi: float = 0.0
    theta: float = 0.0
    psi: float = 0.0
    pos_n: float = 0.0
    pos_e: float = 0.0
    pos_d: float = 0.0

    def __post_init__(self) -> None:
        if abs(self.theta) >= math.pi / 2.0:
            raise GimbalLockError(f"|theta| = {abs(self.theta):.6f} rad >= pi/2")
        object.__setattr__(self, "phi", _wrap_pi(self.phi))
        object.__setattr__(self, "psi", _wrap_pi(self.psi))

    def as_tuple(self) -> tuple[float, ...]:
        return (
            self.u, self.v, self.w,
            self.p, self.q, self.r,
            self.phi, self.theta, self.psi,
            self.pos_n, self.pos_e, self.pos_d,
        )

    @classmethod
    def from_tuple(cls, vec: tuple[float, ...]) -> "BodyState":
        return cls(*vec)


@dataclass(frozen=True)
class ForcesMoments:
    """External forces (N) and moments (N*m) in body axes, gravity excluded."""

    Fx: float = 0.0
    Fy: float = 0.0
    Fz: float = 0.0
    L_mom: float = 0.0
    M_mom: float = 0.0
    N_mom: float = 0.0

    def __post_init__(self) -> None:
        for name in ("Fx", "Fy", "Fz", "L_mom", "M_mom", "N_mom"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} is not finite")

    def __add__(self, other: "ForcesMoments") -> "ForcesMoments":
        return ForcesMoments(
            self.Fx + other.Fx,
            self.Fy + other.Fy,
            self.Fz + other.Fz,
            self.L_mom + other.L_mom,
            self.M_mom + other.M_mom,
            self.N_mom + other.N_mom,
        )


@dataclass(frozen=True)
class BodyStateDerivative:
    """Time derivative of every BodyState component."""

    u_dot: float
    v_dot: float
    w_dot: float
    p_dot: float
    q_dot: float
    r_dot: float
    phi_dot: float
    theta_dot: float
    psi_dot: float
    pos_n_dot: float
    pos_e_dot: float
    pos_d_dot: float

    def as_tuple(self) -> tuple[float, ...]:
        return (
            self.u_dot, self.v_dot, self.w_dot,
            self.p_dot, self.q_dot, self.r_dot,
            self.phi_dot, self.theta_dot, self.psi_dot,
            self.pos_n_dot, self.pos_e_dot, self.pos_d_dot,
        )


def rotation_body_to_ned(phi: float, theta: float, psi: float) -> list[list[float]]:
    """ZYX Euler rotation matrix taking body-frame vectors to NED."""
    cphi, sphi = math.cos(phi), math.sin(phi)
    cth, sth = math.cos(theta), math.sin(theta)
    cpsi, spsi = math.cos(psi), math.sin(psi)
    return [
        [cth * cpsi, sphi * sth * cpsi - cphi * spsi, cphi * sth * cpsi + sphi * spsi],
        [cth * spsi, sphi * sth * spsi + cphi * cpsi, cphi * sth * spsi - sphi * cpsi],
        [-sth, sphi * cth, cphi * cth],
    ]


def body_to_ned(state: BodyState) -> tuple[float, float, float]:
    """Rotate the body-axis velocity (u, v, w) into NED components."""
    rot = rotation_body_to_ned(state.phi, state.theta, state.psi)
    u, v, w = state.u, state.v, state.w
    return (
        rot[0][0] * u + rot[0][1] * v + rot[0][2] * w,
        rot[1][0] * u + rot[1][1] * v + rot[1][2] * w,
        rot[2][0] * u + rot[2][1] * v + rot[2][2] * w,
    )


def ned_to_body(phi: float, theta: float, psi: float,
                vec: tuple[float, float, float]) -> tuple[float, float, float]:
    """Rotate an NED vector into body axes (transpose of body-to-NED)."""
    rot = rotation_body_to_ned(phi, theta, psi)
    x, y, z = vec
    return (
        rot[0][0] * x + rot[1][0] * y + rot[2][0] * z,
        rot[0][1] * x + rot[1][1] * y + rot[2][1] * z,
        rot[0][2] * x + rot[1][2] * y + rot[2][2] * z,
    )


def _derivatives_raw(
    u: float, v: float, w: float,
    p: float, q: float, r: float,
    phi: float, theta: float, psi: float,
    fx: float, fy: float, fz: float,
    lm: float, mm: float, nm: float,
    params: VehicleParams,
) -> tuple[float, ...]:
    """Scalar 12-state derivative kernel shared by the public API and integrators.

    Rotational accelerations are the analytic solution of
    I*omega_dot = M - omega x (I*omega) for the inertia tensor
    [[Ixx, 0, -Ixz], [0, Iyy, 0], [-Ixz, 0, Izz]].
    """
    if abs(theta) >= math.pi / 2.0 - GIMBAL_LOCK_MARGIN:
        raise GimbalLockError(f"|theta| = {abs(theta):.8f} rad too close to pi/2")

    m = params.mass
    g = params.gravity
    ixx, iyy, izz, ixz = params.Ixx, params.Iyy, params.Izz, params.Ixz

    cphi, sphi = math.cos(phi), math.sin(phi)
    cth, sth = math.cos(theta), math.sin(theta)

    # Translational rows; the w-row uses the standard -p*v convention.
    u_dot = r * v - q * w - g * sth + fx / m
    v_dot = p * w - r * u + g * sphi * cth + fy / m
    w_dot = q * u - p * v + g * cphi * cth + fz / m

    # M - omega x (I omega), then invert the coupled p/r block through
    # gamma = Ixx*Izz - Ixz^2.
    rhs_l = lm + ixz * p * q - (izz - iyy) * q * r
    rhs_m = mm - (ixx - izz) * p * r - ixz * (p * p - r * r)
    rhs_n = nm - (iyy - ixx) * p * q - ixz * q * r
    gamma = ixx * izz - ixz * ixz
    p_dot = (izz * rhs_l + ixz * rhs_n) / gamma
    q_dot = rhs_m / iyy
    r_dot = (ixz * rhs_l + ixx * rhs_n) / gamma

    # Euler-angle kinematics.
    tth = sth / cth
    phi_dot = p + tth * (q * sphi + r * cphi)
    theta_dot = q * cphi - r * sphi
    psi_dot = (q * sphi + r * cphi) / cth

    # Position rates via body-to-NED rotation (ZYX, expanded inline).
    cpsi, spsi = math.cos(psi), math.sin(psi)
    pos_n_dot = (
        cth * cpsi * u + (sphi * sth * cpsi - cphi * spsi) * v
        + (cphi * sth * cpsi + sphi * spsi) * w
    )
    pos_e_dot = (
        cth * spsi * u + (sphi * sth * spsi + cphi * cpsi) * v
        + (cphi * sth * spsi - sphi * cpsi) * w
    )
    pos_d_dot = -sth * u + sphi * cth * v + cphi * cth * w

    return (
        u_dot, v_dot, w_dot,
        p_dot, q_dot, r_dot,
        phi_dot, theta_dot, psi_dot,
        pos_n_dot, pos_e_dot, pos_d_dot,
    )


def state_derivative(
    state: BodyState, fm: ForcesMoments, params: VehicleParams
) -> BodyStateDerivative:
    """Time derivatives of all 12 state components under the given loads.

    `fm` carries aerodynamic plus propulsive loads; gravity is applied
    internally from the attitude. Raises GimbalLockError when pitch is
    within GIMBAL_LOCK_MARGIN of +/-90 deg.
    """
    return BodyStateDerivative(
        *_derivatives_raw(
            state.u, state.v, state.w,
            state.p, state.q, state.r,
            state.phi, state.theta, state.psi,
            fm.Fx, fm.Fy, fm.Fz,
            fm.L_mom, fm.M_mom, fm.N_mom,
            params,
        )
    )


def rotational_kinetic_energy(state: BodyState, params: VehicleParams) -> float:
    """0.5 * omega^T I omega for the current body rates."""
    p, q, r = state.p, state.q, state.r
    hx = params.Ixx * p - params.Ixz * r
    hy = params.Iyy * q
    hz = -params.Ixz * p + params.Izz * r
    return 0.5 * (p * hx + q * hy + r * hz)


def angular_momentum_norm(state: BodyState, params: VehicleParams) -> float:
    """|I omega| for the current body rates."""
    p, q, r = state.p, state.q, state.r
    hx = params.Ixx * p - params.Ixz * r
    hy = params.Iyy * q
    hz = -params.Ixz * p + params.Izz * r
    return math.sqrt(hx * hx + hy * hy + hz * hz)
