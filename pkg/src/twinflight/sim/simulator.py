"""Time-stepped simulation of one airframe under aero + rotor loads.

The simulator advances a 12-state rigid-body model with fixed-step RK4
(optionally explicit Euler), rebuilding the aerodynamic and propulsive
loads at every integrator stage. Commands are zero-order-held across a
step. Aerodynamic lookups are skipped below a small airspeed where the
rate nondimensionalization degenerates; hover flight is rotor-dominated
so the fallback costs nothing physically.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable, Iterable

from ..aero.database import AeroDatabase, FlightCondition, coefficients_to_forces
from ..propulsion import PropulsionCommand, RotorGeometry, ThrustCurve, rotor_forces_uvw
from ..vehicle import (
    BodyState,
    GimbalLockError,
    VehicleParams,
    _derivatives_raw,
    body_to_ned,
    flight_mode,
    ned_to_body,
)
from .control import CascadeController, ControllerGains
from .mission import MissionProfile
from .setpoint import Setpoint

SPEED_OF_SOUND = 340.29

# Below this airspeed the aero rate terms are ill-defined; lookups pause.
AERO_MIN_AIRSPEED = 0.5


@dataclass(frozen=True)
class SimConfig:
    dt: float = 0.004
    integrator: str = "rk4"  # "rk4" | "euler"
    air_density: float = 1.225
    wind: tuple[float, float, float] = (0.0, 0.0, 0.0)
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0.0 < self.dt <= 0.02:
            raise ValueError(f"dt must be in (0, 0.02] s, got {self.dt}")
        if self.integrator not in ("rk4", "euler"):
            raise ValueError(f"unknown integrator {self.integrator!r}")


class SimulationHalt(RuntimeError):
    """Simulation stopped on a dynamics error; carries a state dump."""

    def __init__(self, message: str, state_dump: dict):
        super().__init__(message)
        self.state_dump = state_dump


@dataclass
class TelemetryRecord:
    t: float
    state: BodyState
    vel_ned: tuple[float, float, float]
    setpoint: Setpoint | None
    command: PropulsionCommand
    mode: str
    aero_clamped: bool
    aero_moment_pitch: float = 0.0

    def to_dict(self) -> dict:
        s = self.state
        return {
            "t": round(self.t, 6),
            "state": {
                "u": s.u, "v": s.v, "w": s.w,
                "p": s.p, "q": s.q, "r": s.r,
                "phi": s.phi, "theta": s.theta, "psi": s.psi,
                "pos_n": s.pos_n, "pos_e": s.pos_e, "pos_d": s.pos_d,
            },
            "vel_ned": list(self.vel_ned),
            "setpoint": self.setpoint.to_dict() if self.setpoint else None,
            "command": {
                "throttles": list(self.command.throttles),
                "tilt_deg": self.command.tilt_deg,
            },
            "mode": self.mode,
            "aero_clamped": self.aero_clamped,
            "aero_moment_pitch": self.aero_moment_pitch,
        }


class Simulator:
    """One vehicle instance: dynamics, aero, rotors, and its controller."""

    def __init__(
        self,
        params: VehicleParams | None = None,
        database: AeroDatabase | None = None,
        geometry: RotorGeometry | None = None,
        curve: ThrustCurve | None = None,
        gains: ControllerGains | None = None,
        config: SimConfig | None = None,
        initial_state: BodyState | None = None,
    ) -> None:
        self.params = params or VehicleParams()
        self.database = database
        self.geometry = geometry or RotorGeometry()
        self.curve = curve or ThrustCurve()
        self.config = config or SimConfig()
        self.controller = CascadeController(
            gains, self.geometry, self.curve,
            mass=self.params.mass, gravity=self.params.gravity,
        )
        self.state = initial_state or BodyState()
        self.time = 0.0
        self.command = PropulsionCommand(tilt_deg=90.0)
        self.setpoint: Setpoint | None = None
        self.deflections: dict[str, float] = {}
        self.aero_clamp_count = 0
        self._last_aero_clamped = False
        self._last_pitch_moment = 0.0

    # ------------------------------------------------------------------
    # Forces

    def _flight_condition(
        self, u: float, v: float, w: float, p: float, q: float, r: float,
        phi: float, theta: float, psi: float,
    ) -> tuple[float, FlightCondition | None]:
        wind = self.config.wind
        if wind != (0.0, 0.0, 0.0):
            wb = ned_to_body(phi, theta, psi, wind)
            u, v, w = u - wb[0], v - wb[1], w - wb[2]
        airspeed = math.sqrt(u * u + v * v + w * w)
        if airspeed < AERO_MIN_AIRSPEED:
            return airspeed, None
        alpha = math.degrees(math.atan2(w, u))
        beta = math.degrees(math.asin(max(-1.0, min(1.0, v / airspeed))))
        cond = FlightCondition(
            alpha=alpha,
            beta=beta,
            airspeed=airspeed,
            mach=airspeed / SPEED_OF_SOUND,
            p=p, q=q, r=r,
            deflections=self.deflections,
            air_density=self.config.air_density,
        )
        return airspeed, cond

    def _stage_derivative(self, y: tuple[float, ...]) -> tuple[float, ...]:
        u, v, w, p, q, r, phi, theta, psi = y[:9]
        fx = fy = fz = lm = mm = nm = 0.0

        if self.database is not None:
            _, cond = self._flight_condition(u, v, w, p, q, r, phi, theta, psi)
            if cond is not None:
                coeffs, flags = self.database.evaluate(cond)
                aero = coefficients_to_forces(coeffs, cond, self.params)
                fx += aero.Fx
                fy += aero.Fy
                fz += aero.Fz
                lm += aero.L_mom
                mm += aero.M_mom
                nm += aero.N_mom
                self._last_aero_clamped = flags.clamped
                self._last_pitch_moment = aero.M_mom
            else:
                self._last_aero_clamped = False
                self._last_pitch_moment = 0.0

        thrust = rotor_forces_uvw(self.command, u, v, w, self.geometry, self.curve)
        fx += thrust.Fx
        fy += thrust.Fy
        fz += thrust.Fz
        lm += thrust.L_mom
        mm += thrust.M_mom
        nm += thrust.N_mom

        return _derivatives_raw(
            u, v, w, p, q, r, phi, theta, psi, fx, fy, fz, lm, mm, nm, self.params
        )

    # ------------------------------------------------------------------
    # Integration

    def step(self, dt: float | None = None) -> BodyState:
        """Advance one physics step with the current command held."""
        h = self.config.dt if dt is None else dt
        y = self.state.as_tuple()
        try:
            if self.config.integrator == "euler":
                k1 = self._stage_derivative(y)
                ynew = tuple(y[i] + h * k1[i] for i in range(12))
            else:
                k1 = self._stage_derivative(y)
                y2 = tuple(y[i] + 0.5 * h * k1[i] for i in range(12))
                k2 = self._stage_derivative(y2)
                y3 = tuple(y[i] + 0.5 * h * k2[i] for i in range(12))
                k3 = self._stage_derivative(y3)
                y4 = tuple(y[i] + h * k3[i] for i in range(12))
                k4 = self._stage_derivative(y4)
                ynew = tuple(
                    y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
                    for i in range(12)
                )
            self.state = BodyState(*ynew)
        except GimbalLockError as exc:
            raise SimulationHalt(
                f"dynamics failure at t={self.time:.3f} s: {exc}",
                state_dump={"t": self.time, "state": list(y), "command": {
                    "throttles": list(self.command.throttles),
                    "tilt_deg": self.command.tilt_deg,
                }},
            ) from exc
        if self._last_aero_clamped:
            self.aero_clamp_count += 1
        self.time += h
        return self.state

    def apply_setpoint(self, sp: Setpoint) -> None:
        self.setpoint = sp

    def control_step(self) -> None:
        """Run the cascade controller against the active setpoint."""
        if self.setpoint is not None:
            self.command = self.controller.update(self.state, self.setpoint, self.config.dt)

    def record(self) -> TelemetryRecord:
        tilt = self.command.tilt_deg
        return TelemetryRecord(
            t=self.time,
            state=self.state,
            vel_ned=body_to_ned(self.state),
            setpoint=self.setpoint,
            command=self.command,
            mode=flight_mode(tilt).value,
            aero_clamped=self._last_aero_clamped,
            aero_moment_pitch=self._last_pitch_moment,
        )


def run_mission(
    profile: MissionProfile,
    simulator: Simulator,
    extra_time: float = 0.0,
    record_every: int = 1,
    on_tick: Callable[[TelemetryRecord], None] | None = None,
) -> list[TelemetryRecord]:
    """Fly a mission profile closed-loop and return per-tick telemetry."""
    dt = simulator.config.dt
    steps = int(round((profile.duration + extra_time) / dt))
    log: list[TelemetryRecord] = []
    try:
        for i in range(steps):
            seg = profile.active_segment(simulator.time)
            simulator.apply_setpoint(seg.setpoint(timestamp_ms=int(simulator.time * 1000)))
            simulator.control_step()
            simulator.step()
            if i % record_every == 0:
                rec = simulator.record()
                log.append(rec)
                if on_tick is not None:
                    on_tick(rec)
    except SimulationHalt as halt:
        halt.partial_log = log  # keep what was flown for post-mortem
        raise
    return log


def write_telemetry_jsonl(records: Iterable[TelemetryRecord], path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec.to_dict(), sort_keys=True))
            fh.write("\n")
