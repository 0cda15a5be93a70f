"""Database-fidelity comparison runs.

Flies the same scripted forward-flight release under different aerodynamic
databases and records aligned altitude / pitch / pitching-moment traces.
A database with an overly nose-down pitching-moment bias settles at a
negative pitch attitude where an unbiased one holds a small positive trim,
so the steady cruise pitch sign separates the sources.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Mapping

from ..aero.database import AeroDatabase
from ..propulsion import PropulsionCommand
from ..vehicle import BodyState, VehicleParams
from .simulator import SimConfig, SimulationHalt, Simulator


@dataclass
class CruiseTrace:
    """Time series from one cruise release."""

    t: list[float]
    altitude: list[float]  # m above start, positive up
    pitch_deg: list[float]
    pitch_moment: list[float]  # N*m aero pitching moment
    halted: bool = False  # dynamics departed the modeled envelope

    def steady_pitch_deg(self, window_s: float = 4.0) -> float:
        """Mean pitch attitude over the final window seconds."""
        if not self.t:
            return 0.0
        t_end = self.t[-1]
        vals = [p for ti, p in zip(self.t, self.pitch_deg) if ti >= t_end - window_s]
        return sum(vals) / len(vals)

    def to_dict(self) -> dict:
        return {
            "t": self.t,
            "altitude": self.altitude,
            "pitch_deg": self.pitch_deg,
            "pitch_moment": self.pitch_moment,
            "halted": self.halted,
        }


def cruise_release(
    database: AeroDatabase,
    params: VehicleParams | None = None,
    duration: float = 12.0,
    speed: float = 20.0,
    altitude: float = 100.0,
    front_throttle: float = 0.11,
    config: SimConfig | None = None,
    sample_hz: float = 50.0,
) -> CruiseTrace:
    """Open-loop cruise: forward release with rotors tilted fully forward.

    The front rotors run a fixed scripted throttle (matching trim drag at
    the release speed), the rear rotors are stopped, and the airframe is
    left to settle on its aerodynamic pitch trim. A database whose trim
    has no lifting equilibrium dives until the run halts; the truncated
    trace is returned with `halted` set.
    """
    params = params or VehicleParams()
    sim = Simulator(
        params=params,
        database=database,
        config=config or SimConfig(),
        initial_state=BodyState(u=speed, pos_d=-altitude),
    )
    sim.command = PropulsionCommand(
        throttles=(front_throttle, front_throttle, 0.0, 0.0), tilt_deg=0.0
    )
    every = max(1, int(round(1.0 / (sample_hz * sim.config.dt))))
    steps = int(round(duration / sim.config.dt))
    trace = CruiseTrace(t=[], altitude=[], pitch_deg=[], pitch_moment=[])
    for i in range(steps):
        try:
            sim.step()
        except SimulationHalt:
            trace.halted = True
            break
        if i % every == 0:
            trace.t.append(sim.time)
            trace.altitude.append(-sim.state.pos_d - altitude)
            trace.pitch_deg.append(math.degrees(sim.state.theta))
            trace.pitch_moment.append(sim._last_pitch_moment)
    return trace


def fidelity_comparison(
    databases: Mapping[str, AeroDatabase],
    duration: float = 12.0,
    **kwargs,
) -> dict[str, CruiseTrace]:
    """Identical cruise release under each database; traces share a time base."""
    return {
        name: cruise_release(db, duration=duration, **kwargs)
        for name, db in databases.items()
    }


def write_comparison_json(traces: Mapping[str, CruiseTrace], path: str) -> None:
    payload = {
        name: {**trace.to_dict(), "steady_pitch_deg": trace.steady_pitch_deg()}
        for name, trace in traces.items()
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True)
        fh.write("\n")
