"""Link-side policies: stream pacing, velocity clamping, offboard watchdog.

The setpoint stream runs at a fixed rate (30 Hz by default); every tick
re-sends the latest digital-twin state even if nothing changed, because
the receiving flight stack drops out of offboard control when the stream
stalls. All outgoing velocities pass the firmware-style clamp: horizontal
magnitude scaled direction-preserving to the limit, vertical clamped
independently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

from ..sim.setpoint import Setpoint


@dataclass(frozen=True)
class BridgeConfig:
    stream_rate: float = 30.0  # Hz
    velocity_limit: float = 3.0  # m/s
    offboard_timeout_ms: int = 500
    system_id: int = 1
    component_id: int = 1

    def __post_init__(self) -> None:
        if self.stream_rate <= 0:
            raise ValueError("stream_rate must be positive")
        if self.velocity_limit <= 0:
            raise ValueError("velocity_limit must be positive")
        if self.offboard_timeout_ms <= 0:
            raise ValueError("offboard_timeout_ms must be positive")


def clamp_setpoint(sp: Setpoint, limit: float) -> tuple[Setpoint, bool]:
    """Clamp setpoint velocity to the firmware limit.

    Horizontal speed is scaled preserving direction; the vertical
    component is clamped on its own. Returns the (possibly new) setpoint
    and whether anything was clamped.
    """
    vn, ve, vd = sp.velocity
    clamped = False
    horiz = math.hypot(vn, ve)
    if horiz > limit:
        scale = limit / horiz
        vn *= scale
        ve *= scale
        clamped = True
    if abs(vd) > limit:
        vd = math.copysign(limit, vd)
        clamped = True
    if not clamped:
        return sp, False
    return replace(sp, velocity=(vn, ve, vd)), True


class StreamScheduler:
    """Fixed-rate tick source with missed-deadline accounting."""

    def __init__(self, rate_hz: float):
        if rate_hz <= 0:
            raise ValueError("rate must be positive")
        self.period = 1.0 / rate_hz
        self._next_due: float | None = None
        self.sent = 0
        self.missed_deadlines = 0

    def due(self, now: float) -> int:
        """Number of sends due by `now`; advances the schedule."""
        if self._next_due is None:
            self._next_due = now
        count = 0
        while self._next_due <= now + 1e-12:
            count += 1
            self._next_due += self.period
        if count > 1:
            self.missed_deadlines += count - 1
        self.sent += count
        return count


class OffboardMode(Enum):
    INACTIVE = "inactive"
    ACTIVE = "active"
    LOST = "lost"


@dataclass
class OffboardState:
    mode: OffboardMode = OffboardMode.INACTIVE
    last_setpoint_time_ms: int | None = None


def offboard_watchdog(state: OffboardState, now_ms: int, timeout_ms: int) -> OffboardState:
    """Advance the offboard state machine for the current time.

    Active lapses to Lost once the stream has been silent longer than the
    timeout; a later setpoint (fed via `offboard_feed`) reactivates it.
    """
    if state.mode is OffboardMode.ACTIVE and state.last_setpoint_time_ms is not None:
        if now_ms - state.last_setpoint_time_ms > timeout_ms:
            return OffboardState(OffboardMode.LOST, state.last_setpoint_time_ms)
    return state


def offboard_feed(state: OffboardState, now_ms: int) -> OffboardState:
    """Register a freshly received setpoint."""
    return OffboardState(OffboardMode.ACTIVE, now_ms)
