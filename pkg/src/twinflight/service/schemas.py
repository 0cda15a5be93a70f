"""Request/response models for the gateway HTTP and WebSocket API."""

from __future__ import annotations

import math

from pydantic import BaseModel, Field, field_validator


class HealthResponse(BaseModel):
    status: str = "ok"
    session_running: bool = False
    session_time: float = 0.0


class SessionStartRequest(BaseModel):
    duration: float | None = Field(default=None, description="virtual seconds; None runs until stopped")
    script: str = Field(default="hover", description="hover | square")
    speed: float = 2.0
    delay: float = Field(default=0.0, ge=0.0, description="injected one-way link delay, s")
    loss: float = Field(default=0.0, ge=0.0, le=1.0)
    kill_stream_at: float | None = None
    seed: int = 0
    realtime_factor: float = Field(
        default=1.0, ge=0.0,
        description="virtual seconds per wall second; 0 runs unpaced",
    )


class SessionStartResponse(BaseModel):
    started: bool
    detail: str = ""


class CommandRequest(BaseModel):
    velocity: tuple[float, float, float]
    yaw_rate: float = 0.0

    @field_validator("velocity")
    @classmethod
    def _finite_velocity(cls, v):
        if not all(math.isfinite(x) for x in v):
            raise ValueError("velocity components must be finite")
        return v

    @field_validator("yaw_rate")
    @classmethod
    def _finite_yaw_rate(cls, v):
        if not math.isfinite(v):
            raise ValueError("yaw_rate must be finite")
        return v


class CommandAck(BaseModel):
    accepted: bool
    velocity: tuple[float, float, float] = (0.0, 0.0, 0.0)
    yaw_rate: float = 0.0
    clamped: bool = False
    reason: str | None = None


class TwinStateModel(BaseModel):
    position: tuple[float, float, float]
    velocity: tuple[float, float, float]
    attitude: tuple[float, float, float]


class TelemetrySnapshot(BaseModel):
    type: str = "telemetry"
    t: float
    digital: TwinStateModel
    physical: TwinStateModel
    offboard: str
    active_command: dict
    clamp_events: int
    frames_sent: int


class ThrustResponse(BaseModel):
    inflow: float
    max_thrust: float
