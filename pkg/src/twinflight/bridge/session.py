"""Twin teleoperation session: digital twin, physical twin, and the link.

Both twins run the same airframe model. The digital twin flies operator
velocity commands; the bridge samples its state at the stream rate,
clamps the velocity, frames the setpoint, and ships it over the (possibly
impaired) transport to the physical twin, which tracks it under an
offboard watchdog. The physical twin streams position/attitude telemetry
back. Everything advances on one virtual clock, so a session is
deterministic and runs much faster than real time; a wall-clock pacer is
layered on top for live (gateway) use.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from typing import Callable

from ..aero.database import AeroDatabase
from ..sim.control import ControllerGains
from ..sim.setpoint import MASK_POSITION, MASK_VELOCITY, MASK_YAW, Setpoint
from ..sim.simulator import SimConfig, Simulator, TelemetryRecord
from ..vehicle import BodyState, VehicleParams, body_to_ned
from .framing import DecodeError
from .link import (
    BridgeConfig,
    OffboardMode,
    OffboardState,
    StreamScheduler,
    clamp_setpoint,
    offboard_feed,
    offboard_watchdog,
)
from .messages import Attitude, LocalPosition, decode_message, encode_message
from .metrics import TwinSyncMetrics, compute_sync_metrics
from .transport import FaultProfile, LoopbackTwinLink, TwinLink


@dataclass(frozen=True)
class TimedCommand:
    t: float
    velocity: tuple[float, float, float]
    yaw: float = 0.0


@dataclass(frozen=True)
class CommandScript:
    """Step schedule of operator velocity commands."""

    commands: tuple[TimedCommand, ...]

    def __post_init__(self) -> None:
        ts = [c.t for c in self.commands]
        if ts != sorted(ts):
            raise ValueError("commands must be time-ordered")

    def active(self, t: float) -> TimedCommand | None:
        ts = [c.t for c in self.commands]
        idx = bisect.bisect_right(ts, t) - 1
        return self.commands[idx] if idx >= 0 else None

    @classmethod
    def square(
        cls, speed: float = 2.0, leg_duration: float = 10.0, start: float = 5.0
    ) -> "CommandScript":
        dirs = ((1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0))
        cmds = [TimedCommand(0.0, (0.0, 0.0, 0.0))]
        for i, (dn, de) in enumerate(dirs):
            cmds.append(TimedCommand(start + i * leg_duration, (dn * speed, de * speed, 0.0)))
        cmds.append(TimedCommand(start + 4 * leg_duration, (0.0, 0.0, 0.0)))
        return cls(tuple(cmds))

    @classmethod
    def hover(cls) -> "CommandScript":
        return cls((TimedCommand(0.0, (0.0, 0.0, 0.0)),))


@dataclass
class RxCounters:
    received: int = 0
    duplicates: int = 0
    out_of_order: int = 0
    gaps: int = 0
    decode_errors: int = 0
    _last_seq: int | None = None

    def track(self, seq: int) -> None:
        self.received += 1
        if self._last_seq is None:
            self._last_seq = seq
            return
        delta = (seq - self._last_seq) % 256
        if delta == 0:
            self.duplicates += 1
        elif delta == 1:
            self._last_seq = seq
        elif delta > 128:
            self.out_of_order += 1  # late arrival from the past
        else:
            self.gaps += delta - 1
            self._last_seq = seq

    def to_dict(self) -> dict:
        return {
            "received": self.received,
            "duplicates": self.duplicates,
            "out_of_order": self.out_of_order,
            "gaps": self.gaps,
            "decode_errors": self.decode_errors,
        }


@dataclass(frozen=True)
class SessionConfig:
    duration: float = 60.0
    dt: float = 0.004
    bridge: BridgeConfig = field(default_factory=BridgeConfig)
    faults: FaultProfile = field(default_factory=FaultProfile)
    hover_altitude: float = 10.0
    kill_stream_at: float | None = None
    snapshot_hz: float = 10.0
    seed: int = 0


@dataclass
class SendLogEntry:
    t: float
    setpoint: Setpoint
    clamped: bool


@dataclass
class SessionEventLog:
    t: float
    kind: str
    detail: str = ""


@dataclass
class SessionResult:
    digital_log: list[TelemetryRecord]
    physical_log: list[TelemetryRecord]
    send_log: list[SendLogEntry]
    events: list[SessionEventLog]
    rx_setpoints: RxCounters
    rx_telemetry: RxCounters
    frames_sent: int
    clamp_events: int
    config: SessionConfig

    def sync_metrics(self) -> TwinSyncMetrics:
        return compute_sync_metrics(self.digital_log, self.physical_log)


class TeleopSession:
    """One digital/physical twin pair joined by the setpoint bridge."""

    def __init__(
        self,
        config: SessionConfig | None = None,
        database: AeroDatabase | None = None,
        params: VehicleParams | None = None,
        gains: ControllerGains | None = None,
        script: CommandScript | None = None,
        link: TwinLink | None = None,
    ) -> None:
        self.config = config or SessionConfig()
        self.script = script or CommandScript.hover()
        params = params or VehicleParams()
        sim_cfg = SimConfig(dt=self.config.dt, seed=self.config.seed)
        start = BodyState(pos_d=-self.config.hover_altitude)
        self.digital = Simulator(
            params=params, database=database, gains=gains, config=sim_cfg,
            initial_state=start,
        )
        self.physical = Simulator(
            params=params, database=database, gains=gains, config=sim_cfg,
            initial_state=start,
        )
        hold = Setpoint.position_target((0.0, 0.0, -self.config.hover_altitude), yaw=0.0)
        self.digital.apply_setpoint(hold)
        self.physical.apply_setpoint(hold)

        self.link = link if link is not None else LoopbackTwinLink(self.config.faults)
        self.scheduler = StreamScheduler(self.config.bridge.stream_rate)
        self.return_scheduler = StreamScheduler(self.config.bridge.stream_rate)
        self.offboard = OffboardState()
        self.rx_setpoints = RxCounters()
        self.rx_telemetry = RxCounters()
        self.seq_to_physical = 0
        self.seq_to_digital = 0
        self.clamp_events = 0
        self.frames_sent = 0
        self.stream_enabled = True
        self.time = 0.0
        self.events: list[SessionEventLog] = []
        self.send_log: list[SendLogEntry] = []
        self.digital_log: list[TelemetryRecord] = []
        self.physical_log: list[TelemetryRecord] = []
        self.last_physical_position: LocalPosition | None = None
        self.last_physical_attitude: Attitude | None = None
        self._last_command_velocity = (0.0, 0.0, 0.0)
        self._last_command_clamped = False
        self._manual_command: TimedCommand | None = None
        self._hold_setpoint: Setpoint | None = None

    # ------------------------------------------------------------------

    def inject_command(
        self, velocity: tuple[float, float, float], yaw_rate: float = 0.0
    ) -> tuple[tuple[float, float, float], bool]:
        """Operator command entry point; returns post-clamp velocity.

        Shares the bridge clamp so no request can bypass the limit.
        """
        sp = Setpoint.velocity_target(velocity, yaw_rate=yaw_rate)
        sp, clamped = clamp_setpoint(sp, self.config.bridge.velocity_limit)
        self._manual_command = TimedCommand(self.time, sp.velocity, 0.0)
        self._last_command_velocity = sp.velocity
        self._last_command_clamped = clamped
        return sp.velocity, clamped

    def _operator_setpoint(self) -> None:
        cmd = self.script.active(self.time)
        if self._manual_command is not None and (
            cmd is None or self._manual_command.t >= cmd.t
        ):
            cmd = self._manual_command
        if cmd is None:
            return
        sp = Setpoint.velocity_target(
            cmd.velocity, yaw=cmd.yaw, timestamp_ms=int(self.time * 1000)
        )
        sp, clamped = clamp_setpoint(sp, self.config.bridge.velocity_limit)
        self._last_command_velocity = sp.velocity
        self._last_command_clamped = clamped
        self.digital.apply_setpoint(sp)

    def kill_stream(self) -> None:
        if self.stream_enabled:
            self.stream_enabled = False
            self.events.append(SessionEventLog(self.time, "stream_killed"))

    def _bridge_tick(self) -> None:
        """Sample the digital twin and stream it as the physical setpoint."""
        state = self.digital.state
        vel = body_to_ned(state)
        sp = Setpoint.track_target(
            position=(state.pos_n, state.pos_e, state.pos_d),
            velocity=vel,
            yaw=state.psi,
            timestamp_ms=int(self.time * 1000),
        )
        sp, clamped = clamp_setpoint(sp, self.config.bridge.velocity_limit)
        if clamped:
            self.clamp_events += 1
        self.send_log.append(SendLogEntry(self.time, sp, clamped))
        data = encode_message(
            sp,
            sequence=self.seq_to_physical,
            system_id=self.config.bridge.system_id,
            component_id=self.config.bridge.component_id,
        )
        self.seq_to_physical = (self.seq_to_physical + 1) % 256
        self.frames_sent += 1
        self.link.send_d2p(data, self.time)

    def _physical_rx(self) -> None:
        now_ms = int(self.time * 1000)
        for datagram in self.link.poll_d2p(self.time):
            try:
                msg, frame = decode_message(datagram)
            except DecodeError:
                self.rx_setpoints.decode_errors += 1
                continue
            if isinstance(msg, Setpoint):
                self.rx_setpoints.track(frame.sequence)
                was_lost = self.offboard.mode is OffboardMode.LOST
                self.offboard = offboard_feed(self.offboard, now_ms)
                if was_lost:
                    self.events.append(SessionEventLog(self.time, "offboard_recovered"))
                self._hold_setpoint = None
                self.physical.apply_setpoint(msg)

        prev_mode = self.offboard.mode
        self.offboard = offboard_watchdog(
            self.offboard, now_ms, self.config.bridge.offboard_timeout_ms
        )
        if self.offboard.mode is OffboardMode.LOST and prev_mode is OffboardMode.ACTIVE:
            state = self.physical.state
            self._hold_setpoint = Setpoint(
                type_mask=MASK_POSITION | MASK_VELOCITY | MASK_YAW,
                position=(state.pos_n, state.pos_e, state.pos_d),
                velocity=(0.0, 0.0, 0.0),
                yaw=state.psi,
                timestamp_ms=now_ms,
            )
            self.physical.apply_setpoint(self._hold_setpoint)
            self.events.append(SessionEventLog(self.time, "offboard_lost"))

    def _physical_return_tick(self) -> None:
        state = self.physical.state
        vel = body_to_ned(state)
        now_ms = int(self.time * 1000)
        pos_msg = LocalPosition(
            position=(state.pos_n, state.pos_e, state.pos_d),
            velocity=vel,
            timestamp_ms=now_ms,
        )
        att_msg = Attitude(state.phi, state.theta, state.psi, state.p, state.q,
                           state.r, now_ms)
        for msg in (pos_msg, att_msg):
            self.link.send_p2d(
                encode_message(msg, sequence=self.seq_to_digital), self.time
            )
            self.seq_to_digital = (self.seq_to_digital + 1) % 256

    def _digital_rx(self) -> None:
        for datagram in self.link.poll_p2d(self.time):
            try:
                msg, frame = decode_message(datagram)
            except DecodeError:
                self.rx_telemetry.decode_errors += 1
                continue
            self.rx_telemetry.track(frame.sequence)
            if isinstance(msg, LocalPosition):
                self.last_physical_position = msg
            elif isinstance(msg, Attitude):
                self.last_physical_attitude = msg

    # ------------------------------------------------------------------

    def step(self) -> None:
        """Advance the whole session by one physics step."""
        cfg = self.config
        if cfg.kill_stream_at is not None and self.time >= cfg.kill_stream_at:
            self.kill_stream()

        self._operator_setpoint()
        self.digital.control_step()
        self.digital.step()

        if self.stream_enabled:
            for _ in range(self.scheduler.due(self.time)):
                self._bridge_tick()
        self._physical_rx()
        self.physical.control_step()
        self.physical.step()
        for _ in range(self.return_scheduler.due(self.time)):
            self._physical_return_tick()
        self._digital_rx()

        self.time += cfg.dt
        self.digital_log.append(self.digital.record())
        self.physical_log.append(self.physical.record())

    def snapshot(self) -> dict:
        """Condensed twin status for live clients."""
        d, p = self.digital.state, self.physical.state
        return {
            "t": round(self.time, 4),
            "digital": {
                "position": [d.pos_n, d.pos_e, d.pos_d],
                "velocity": list(body_to_ned(d)),
                "attitude": [d.phi, d.theta, d.psi],
            },
            "physical": {
                "position": [p.pos_n, p.pos_e, p.pos_d],
                "velocity": list(body_to_ned(p)),
                "attitude": [p.phi, p.theta, p.psi],
            },
            "offboard": self.offboard.mode.value,
            "active_command": {
                "velocity": list(self._last_command_velocity),
                "clamped": self._last_command_clamped,
            },
            "clamp_events": self.clamp_events,
            "frames_sent": self.frames_sent,
        }

    def run(
        self, on_snapshot: Callable[[dict], None] | None = None
    ) -> SessionResult:
        cfg = self.config
        steps = int(round(cfg.duration / cfg.dt))
        snap_period = 1.0 / cfg.snapshot_hz
        next_snap = 0.0
        for _ in range(steps):
            self.step()
            if on_snapshot is not None and self.time + 1e-12 >= next_snap:
                on_snapshot(self.snapshot())
                next_snap += snap_period
        return SessionResult(
            digital_log=self.digital_log,
            physical_log=self.physical_log,
            send_log=self.send_log,
            events=self.events,
            rx_setpoints=self.rx_setpoints,
            rx_telemetry=self.rx_telemetry,
            frames_sent=self.frames_sent,
            clamp_events=self.clamp_events,
            config=cfg,
        )
