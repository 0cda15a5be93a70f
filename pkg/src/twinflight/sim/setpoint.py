"""Offboard setpoints: NED position/velocity targets with an active-field mask."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

# type_mask bits; a set bit marks the member group as ACTIVE.
MASK_POSITION = 1 << 0
MASK_VELOCITY = 1 << 1
MASK_ACCELERATION = 1 << 2
MASK_YAW = 1 << 3
MASK_YAW_RATE = 1 << 4

ALL_MASK_BITS = (
    MASK_POSITION | MASK_VELOCITY | MASK_ACCELERATION | MASK_YAW | MASK_YAW_RATE
)

Triple = tuple[float, float, float]
_ZERO: Triple = (0.0, 0.0, 0.0)


@dataclass(frozen=True)
class Setpoint:
    """Commanded target in the local NED frame.

    Masked-out members are carried but must be ignored by consumers; at
    least one member group has to be active.
    """

    type_mask: int
    position: Triple = _ZERO
    velocity: Triple = _ZERO
    acceleration: Triple = _ZERO
    yaw: float = 0.0
    yaw_rate: float = 0.0
    timestamp_ms: int = 0
    frame: str = "LOCAL_NED"

    def __post_init__(self) -> None:
        if self.type_mask & ALL_MASK_BITS == 0:
            raise ValueError("setpoint must have at least one active member group")
        if self.frame != "LOCAL_NED":
            raise ValueError(f"unsupported setpoint frame {self.frame!r}")

    def is_finite(self) -> bool:
        vals = (*self.position, *self.velocity, *self.acceleration, self.yaw, self.yaw_rate)
        return all(map(math.isfinite, vals))

    def has(self, bit: int) -> bool:
        return bool(self.type_mask & bit)

    @classmethod
    def velocity_target(
        cls, velocity: Triple, yaw: float | None = None, yaw_rate: float | None = None,
        timestamp_ms: int = 0,
    ) -> "Setpoint":
        mask = MASK_VELOCITY
        if yaw is not None:
            mask |= MASK_YAW
        if yaw_rate is not None:
            mask |= MASK_YAW_RATE
        return cls(
            type_mask=mask,
            velocity=velocity,
            yaw=yaw or 0.0,
            yaw_rate=yaw_rate or 0.0,
            timestamp_ms=timestamp_ms,
        )

    @classmethod
    def position_target(
        cls, position: Triple, yaw: float | None = None, timestamp_ms: int = 0
    ) -> "Setpoint":
        mask = MASK_POSITION | (MASK_YAW if yaw is not None else 0)
        return cls(type_mask=mask, position=position, yaw=yaw or 0.0, timestamp_ms=timestamp_ms)

    @classmethod
    def track_target(
        cls, position: Triple, velocity: Triple, yaw: float, timestamp_ms: int = 0
    ) -> "Setpoint":
        """Position plus velocity feedforward, as streamed twin-to-twin."""
        return cls(
            type_mask=MASK_POSITION | MASK_VELOCITY | MASK_YAW,
            position=position,
            velocity=velocity,
            yaw=yaw,
            timestamp_ms=timestamp_ms,
        )

    def to_dict(self) -> dict:
        return {
            "type_mask": self.type_mask,
            "position": list(self.position),
            "velocity": list(self.velocity),
            "acceleration": list(self.acceleration),
            "yaw": self.yaw,
            "yaw_rate": self.yaw_rate,
            "timestamp_ms": self.timestamp_ms,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "Setpoint":
        return cls(
            type_mask=int(raw["type_mask"]),
            position=tuple(raw.get("position", _ZERO)),
            velocity=tuple(raw.get("velocity", _ZERO)),
            acceleration=tuple(raw.get("acceleration", _ZERO)),
            yaw=float(raw.get("yaw", 0.0)),
            yaw_rate=float(raw.get("yaw_rate", 0.0)),
            timestamp_ms=int(raw.get("timestamp_ms", 0)),
        )
