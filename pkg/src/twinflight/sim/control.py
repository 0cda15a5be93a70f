"""Cascaded position -> velocity -> attitude -> rate control for hover flight.

The loop structure mirrors a multicopter flight stack: an active position
target feeds a P loop producing a velocity setpoint, a PI velocity loop
produces an acceleration demand, the demand maps to a tilt-limited thrust
direction plus collective magnitude, and P attitude / PD body-rate loops
mix into per-rotor throttles. Only hover (rotors vertical) is closed-loop;
forward-flight phases run scripted schedules.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..propulsion import PropulsionCommand, RotorGeometry, ThrustCurve, max_thrust
from ..vehicle import BodyState, body_to_ned, _wrap_pi
from .setpoint import (
    MASK_ACCELERATION,
    MASK_POSITION,
    MASK_VELOCITY,
    MASK_YAW,
    MASK_YAW_RATE,
    Setpoint,
)

Triple = tuple[float, float, float]


@dataclass(frozen=True)
class ControllerGains:
    """Loop gains; defaults are hand-tuned for the stock airframe."""

    pos_p: float = 1.1  # 1/s
    vel_p: Triple = (2.6, 2.6, 3.2)
    vel_i: Triple = (0.7, 0.7, 1.0)
    att_p: Triple = (9.0, 9.0, 2.0)  # 1/s on roll/pitch/yaw error
    rate_p: Triple = (0.30, 0.55, 1.2)  # throttle per rad/s rate error
    rate_d: Triple = (0.012, 0.02, 0.0)
    torque_limit: Triple = (0.22, 0.22, 0.30)  # throttle-units clamp per axis
    max_velocity: float = 5.0  # m/s saturation of the velocity setpoint
    max_climb_rate: float = 3.0
    max_tilt_deg: float = 35.0
    yaw_rate_limit: float = 0.5  # rad/s

    def __post_init__(self) -> None:
        scalars = [self.pos_p, self.max_velocity, self.max_climb_rate,
                   self.max_tilt_deg, self.yaw_rate_limit]
        vectors = [self.vel_p, self.vel_i, self.att_p, self.rate_p, self.rate_d,
                   self.torque_limit]
        if any(s < 0 for s in scalars) or any(g < 0 for vec in vectors for g in vec):
            raise ValueError("controller gains must be non-negative")


def attitude_from_thrust(
    f_ned: Triple, yaw: float, max_tilt_rad: float
) -> tuple[float, float, float]:
    """Desired (roll, pitch, thrust magnitude) from an NED specific-force
    demand and a yaw setpoint, with the tilt angle limited."""
    fn, fe, fd = f_ned
    up = -fd  # thrust must point mostly up (negative NED z)
    if up < 1e-6:
        up = 1e-6
    horiz = math.hypot(fn, fe)
    max_horiz = up * math.tan(max_tilt_rad)
    if horiz > max_horiz:
        scale = max_horiz / horiz
        fn *= scale
        fe *= scale
        horiz = max_horiz
    mag = math.sqrt(fn * fn + fe * fe + up * up)
    # Rotate the horizontal demand into the yaw frame, then tilt toward it.
    cpsi, spsi = math.cos(yaw), math.sin(yaw)
    fwd = fn * cpsi + fe * spsi
    right = -fn * spsi + fe * cpsi
    pitch = math.atan2(-fwd, up)
    roll = math.atan2(right * math.cos(pitch), up)
    return roll, pitch, mag


class CascadeController:
    """Stateful hover controller driving the four lift rotors."""

    def __init__(
        self,
        gains: ControllerGains | None = None,
        geometry: RotorGeometry | None = None,
        curve: ThrustCurve | None = None,
        mass: float = 11.828,
        gravity: float = 9.80665,
    ) -> None:
        self.gains = gains or ControllerGains()
        self.geometry = geometry or RotorGeometry()
        self.curve = curve or ThrustCurve()
        self.mass = mass
        self.gravity = gravity
        self.max_rotor_thrust = max_thrust(self.curve, 0.0)
        self.integrator = [0.0, 0.0, 0.0]
        self.saturated = False
        self._prev_rates: Triple | None = None
        self._last_command = PropulsionCommand(tilt_deg=90.0)
        # Mixer signs per rotor from its geometry and spin direction.
        self._mix = []
        for rotor in self.geometry.rotors:
            x, y, _ = rotor.position
            self._mix.append((
                -1.0 if y > 0 else 1.0,  # roll: raise the -y side for +L
                1.0 if x > 0 else -1.0,  # pitch: raise the +x side for +M
                float(rotor.spin_direction),  # yaw via reaction torque
            ))

    def reset(self) -> None:
        self.integrator = [0.0, 0.0, 0.0]
        self.saturated = False
        self._prev_rates = None
        self._last_command = PropulsionCommand(tilt_deg=90.0)

    def update(self, state: BodyState, sp: Setpoint, dt: float) -> PropulsionCommand:
        """One control step; non-finite setpoints hold the previous command."""
        if not sp.is_finite():
            return self._last_command
        g = self.gains

        # Velocity setpoint from position error plus any velocity feedforward.
        vel_sp = [0.0, 0.0, 0.0]
        if sp.has(MASK_POSITION):
            vel_sp[0] += g.pos_p * (sp.position[0] - state.pos_n)
            vel_sp[1] += g.pos_p * (sp.position[1] - state.pos_e)
            vel_sp[2] += g.pos_p * (sp.position[2] - state.pos_d)
        if sp.has(MASK_VELOCITY):
            vel_sp[0] += sp.velocity[0]
            vel_sp[1] += sp.velocity[1]
            vel_sp[2] += sp.velocity[2]
        horiz = math.hypot(vel_sp[0], vel_sp[1])
        if horiz > g.max_velocity:
            scale = g.max_velocity / horiz
            vel_sp[0] *= scale
            vel_sp[1] *= scale
        vel_sp[2] = max(-g.max_climb_rate, min(g.max_climb_rate, vel_sp[2]))

        vel = body_to_ned(state)
        err = [vel_sp[i] - vel[i] for i in range(3)]
        accel_sp = [
            g.vel_p[i] * err[i] + g.vel_i[i] * self.integrator[i] for i in range(3)
        ]
        if sp.has(MASK_ACCELERATION):
            for i in range(3):
                accel_sp[i] += sp.acceleration[i]

        # Thrust demand: f = a_sp - g_vec, in specific-force units.
        f_ned = (accel_sp[0], accel_sp[1], accel_sp[2] - self.gravity)

        if sp.has(MASK_YAW):
            yaw_des = sp.yaw
        else:
            yaw_des = state.psi
        # Tilt is decomposed in the frame the vehicle currently occupies;
        # the yaw loop closes the heading separately.
        roll_des, pitch_des, _ = attitude_from_thrust(
            f_ned, state.psi, math.radians(g.max_tilt_deg)
        )

        # Thrust magnitude from projecting the demand onto the actual body
        # z axis, so an attitude still in transit does not over-lift.
        cphi, sphi = math.cos(state.phi), math.sin(state.phi)
        cth, sth = math.cos(state.theta), math.sin(state.theta)
        cpsi2, spsi2 = math.cos(state.psi), math.sin(state.psi)
        zb_n = cphi * sth * cpsi2 + sphi * spsi2
        zb_e = cphi * sth * spsi2 - sphi * cpsi2
        zb_d = cphi * cth
        f_proj = max(0.1, -(f_ned[0] * zb_n + f_ned[1] * zb_e + f_ned[2] * zb_d))
        collective = self.mass * f_proj / (4.0 * self.max_rotor_thrust)

        # Attitude P -> body-rate setpoints.
        rate_sp = [
            g.att_p[0] * _wrap_pi(roll_des - state.phi),
            g.att_p[1] * (pitch_des - state.theta),
            g.att_p[2] * _wrap_pi(yaw_des - state.psi),
        ]
        if sp.has(MASK_YAW_RATE):
            rate_sp[2] += sp.yaw_rate
        rate_sp[2] = max(-g.yaw_rate_limit, min(g.yaw_rate_limit, rate_sp[2]))

        rates = (state.p, state.q, state.r)
        prev = self._prev_rates if self._prev_rates is not None else rates
        torque_u = [
            g.rate_p[i] * (rate_sp[i] - rates[i]) - g.rate_d[i] * (rates[i] - prev[i]) / dt
            for i in range(3)
        ]
        torque_u = [
            max(-g.torque_limit[i], min(g.torque_limit[i], torque_u[i])) for i in range(3)
        ]
        self._prev_rates = rates
        collective = max(0.08, min(0.92, collective))

        # Collective and roll/pitch authority first; yaw gets any headroom
        # left so a large heading error cannot starve the lift loop.
        bases = []
        saturated = False
        for s_roll, s_pitch, _ in self._mix:
            base = collective + s_roll * torque_u[0] + s_pitch * torque_u[1]
            if base < 0.0 or base > 1.0:
                saturated = True
            bases.append(max(0.0, min(1.0, base)))
        yaw_scale = 1.0
        for base, (_, _, s_yaw) in zip(bases, self._mix):
            delta = s_yaw * torque_u[2]
            if delta > 1e-9 and base + delta > 1.0:
                yaw_scale = min(yaw_scale, (1.0 - base) / delta)
            elif delta < -1e-9 and base + delta < 0.0:
                yaw_scale = min(yaw_scale, -base / delta)
        yaw_scale = max(0.0, yaw_scale)
        throttles = [
            max(0.0, min(1.0, base + yaw_scale * s_yaw * torque_u[2]))
            for base, (_, _, s_yaw) in zip(bases, self._mix)
        ]
        self.saturated = saturated

        # Anti-windup: integrate velocity error only while unsaturated.
        if not saturated:
            for i in range(3):
                self.integrator[i] += err[i] * dt

        cmd = PropulsionCommand(throttles=tuple(throttles), tilt_deg=90.0)
        self._last_command = cmd
        return cmd


def cascade_control(
    state: BodyState, sp: Setpoint, gains: ControllerGains | None = None, dt: float = 0.004
) -> PropulsionCommand:
    """Single stateless control evaluation (fresh integrator and filters)."""
    return CascadeController(gains).update(state, sp, dt)
