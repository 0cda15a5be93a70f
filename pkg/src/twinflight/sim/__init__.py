"""Closed-loop vehicle simulation: controller, missions, integrator."""

from .control import CascadeController, ControllerGains, cascade_control
from .mission import MissionProfile, Segment, square_pattern
from .setpoint import (
    MASK_ACCELERATION,
    MASK_POSITION,
    MASK_VELOCITY,
    MASK_YAW,
    MASK_YAW_RATE,
    Setpoint,
)
from .simulator import (
    SimConfig,
    SimulationHalt,
    Simulator,
    TelemetryRecord,
    run_mission,
    write_telemetry_jsonl,
)
from .studies import CruiseTrace, cruise_release, fidelity_comparison, write_comparison_json

__all__ = [
    "CascadeController",
    "ControllerGains",
    "CruiseTrace",
    "MASK_ACCELERATION",
    "MASK_POSITION",
    "MASK_VELOCITY",
    "MASK_YAW",
    "MASK_YAW_RATE",
    "MissionProfile",
    "Segment",
    "Setpoint",
    "SimConfig",
    "SimulationHalt",
    "Simulator",
    "TelemetryRecord",
    "cascade_control",
    "cruise_release",
    "fidelity_comparison",
    "run_mission",
    "square_pattern",
    "write_comparison_json",
    "write_telemetry_jsonl",
]
