"""Mission profiles: timed sequences of position or velocity segments."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .setpoint import Setpoint


@dataclass(frozen=True)
class Segment:
    """One mission leg, flown for `duration` seconds."""

    kind: str  # "waypoint" | "velocity"
    target: tuple[float, float, float]  # NED position (m) or velocity (m/s)
    duration: float
    yaw: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in ("waypoint", "velocity"):
            raise ValueError(f"unknown segment kind {self.kind!r}")
        if self.duration <= 0:
            raise ValueError("segment duration must be positive")

    def setpoint(self, timestamp_ms: int = 0) -> Setpoint:
        if self.kind == "waypoint":
            return Setpoint.position_target(self.target, yaw=self.yaw,
                                            timestamp_ms=timestamp_ms)
        return Setpoint.velocity_target(self.target, yaw=self.yaw,
                                        timestamp_ms=timestamp_ms)


@dataclass(frozen=True)
class MissionProfile:
    segments: tuple[Segment, ...]

    def __post_init__(self) -> None:
        if not self.segments:
            raise ValueError("mission must contain at least one segment")

    @property
    def duration(self) -> float:
        return sum(s.duration for s in self.segments)

    def active_segment(self, t: float) -> Segment:
        """Segment in effect at mission time t (last one after the end)."""
        acc = 0.0
        for seg in self.segments:
            acc += seg.duration
            if t < acc:
                return seg
        return self.segments[-1]

    def to_json(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(
                {
                    "segments": [
                        {
                            "kind": s.kind,
                            "target": list(s.target),
                            "duration": s.duration,
                            "yaw": s.yaw,
                        }
                        for s in self.segments
                    ]
                },
                fh,
                indent=2,
            )
            fh.write("\n")

    @classmethod
    def from_json(cls, path: str) -> "MissionProfile":
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
        return cls(
            segments=tuple(
                Segment(
                    kind=s["kind"],
                    target=tuple(s["target"]),
                    duration=float(s["duration"]),
                    yaw=float(s.get("yaw", 0.0)),
                )
                for s in raw["segments"]
            )
        )


def square_pattern(side_length: float, speed: float, altitude: float) -> MissionProfile:
    """Hover climb, four constant-velocity sides with corner yaws, then a
    position hold back over the start point."""
    if side_length <= 0 or speed <= 0 or altitude <= 0:
        raise ValueError("side length, speed, and altitude must be positive")
    climb_alt = -altitude  # NED z is down
    leg = side_length / speed
    headings = (0.0, math.pi / 2.0, math.pi, -math.pi / 2.0)
    directions = ((1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0))
    segments = [Segment("waypoint", (0.0, 0.0, climb_alt), duration=8.0, yaw=0.0)]
    for (dn, de), yaw in zip(directions, headings):
        segments.append(
            Segment("velocity", (dn * speed, de * speed, 0.0), duration=leg, yaw=yaw)
        )
    segments.append(Segment("waypoint", (0.0, 0.0, climb_alt), duration=6.0, yaw=0.0))
    return MissionProfile(segments=tuple(segments))
