"""Background session runtime shared by the HTTP and WebSocket surfaces.

One live teleoperation session runs in a worker thread, paced against the
wall clock by a configurable real-time factor. Telemetry snapshots fan out
to per-client bounded queues; a client that stops draining (64-message
backlog) is dropped rather than backpressuring the simulation. Operator
commands funnel through a thread-safe queue so injection is serialized
with the session loop.
"""

from __future__ import annotations

import logging
import queue
import threading
import time
from dataclasses import dataclass

from ..aero.database import AeroDatabase
from ..bridge.link import OffboardMode
from ..bridge.link import BridgeConfig
from ..bridge.metrics import compute_sync_metrics
from ..bridge.session import CommandScript, SessionConfig, TeleopSession
from ..bridge.transport import FaultProfile
from ..fusion.emulators import truth_database

log = logging.getLogger(__name__)

CLIENT_BACKLOG = 64
SNAPSHOT_HZ = 10.0


@dataclass
class _PendingCommand:
    velocity: tuple[float, float, float]
    yaw_rate: float
    done: threading.Event
    result: tuple[tuple[float, float, float], bool] | None = None


class SessionManager:
    """Owns at most one running TeleopSession and its client fan-out."""

    def __init__(self, database: AeroDatabase | None = None):
        self._database = database
        self._session: TeleopSession | None = None
        self._thread: threading.Thread | None = None
        self._running = threading.Event()
        self._lock = threading.Lock()
        self._clients: list[queue.Queue] = []
        self._commands: queue.Queue[_PendingCommand] = queue.Queue()
        self._dropped_clients = 0

    # ------------------------------------------------------------------

    @property
    def running(self) -> bool:
        return self._running.is_set()

    @property
    def session(self) -> TeleopSession | None:
        return self._session

    def start(
        self,
        duration: float | None = None,
        script: str = "hover",
        speed: float = 2.0,
        delay: float = 0.0,
        loss: float = 0.0,
        kill_stream_at: float | None = None,
        seed: int = 0,
        realtime_factor: float = 1.0,
        stream_rate: float = 30.0,
        velocity_limit: float = 3.0,
    ) -> None:
        with self._lock:
            if self.running:
                raise RuntimeError("a session is already running")
            cmd_script = (
                CommandScript.square(speed) if script == "square" else CommandScript.hover()
            )
            cfg = SessionConfig(
                duration=duration if duration is not None else 3600.0,
                bridge=BridgeConfig(stream_rate=stream_rate, velocity_limit=velocity_limit),
                faults=FaultProfile(delay=delay, loss_probability=loss, seed=seed),
                kill_stream_at=kill_stream_at,
                seed=seed,
            )
            if self._database is None:
                self._database = truth_database()
            self._session = TeleopSession(cfg, database=self._database, script=cmd_script)
            self._running.set()
            self._thread = threading.Thread(
                target=self._loop,
                args=(duration, realtime_factor),
                name="teleop-session",
                daemon=True,
            )
            self._thread.start()
        self._broadcast({"type": "event", "event": "start"})

    def stop(self) -> None:
        self._running.clear()
        thread = self._thread
        if thread is not None:
            thread.join(timeout=5.0)
        self._thread = None
        self._broadcast({"type": "event", "event": "stop"})

    def _loop(self, duration: float | None, realtime_factor: float) -> None:
        session = self._session
        assert session is not None
        dt = session.config.dt
        snap_period = 1.0 / SNAPSHOT_HZ
        next_snap = 0.0
        wall_start = time.monotonic()
        try:
            while self._running.is_set():
                if duration is not None and session.time >= duration:
                    break
                self._drain_commands(session)
                session.step()
                if session.time + 1e-12 >= next_snap:
                    snap = session.snapshot()
                    snap["type"] = "telemetry"
                    self._broadcast(snap)
                    next_snap += snap_period
                if realtime_factor > 0.0:
                    target = wall_start + session.time / realtime_factor
                    lead = target - time.monotonic()
                    if lead > 0:
                        time.sleep(lead)
        except Exception as exc:  # surfaced to clients as a session event
            log.exception("session loop failed")
            self._broadcast({"type": "event", "event": "error", "detail": str(exc)})
        finally:
            self._running.clear()

    def _drain_commands(self, session: TeleopSession) -> None:
        while True:
            try:
                pending = self._commands.get_nowait()
            except queue.Empty:
                return
            pending.result = session.inject_command(pending.velocity, pending.yaw_rate)
            pending.done.set()

    # ------------------------------------------------------------------

    def command(
        self, velocity: tuple[float, float, float], yaw_rate: float = 0.0
    ) -> tuple[tuple[float, float, float], bool]:
        """Inject an operator command; returns (post-clamp velocity, clamped)."""
        session = self._session
        if not self.running or session is None:
            raise RuntimeError("session stopped")
        if session.offboard.mode is OffboardMode.LOST:
            raise RuntimeError("offboard lost")
        pending = _PendingCommand(velocity, yaw_rate, threading.Event())
        self._commands.put(pending)
        if not pending.done.wait(timeout=2.0):
            raise RuntimeError("session loop unresponsive")
        assert pending.result is not None
        return pending.result

    def metrics(self) -> dict:
        session = self._session
        if session is None:
            raise RuntimeError("no session has run")
        return compute_sync_metrics(session.digital_log, session.physical_log).to_dict()

    # ------------------------------------------------------------------

    def subscribe(self) -> queue.Queue:
        q: queue.Queue = queue.Queue(maxsize=CLIENT_BACKLOG)
        with self._lock:
            self._clients.append(q)
        return q

    def unsubscribe(self, q: queue.Queue) -> None:
        with self._lock:
            if q in self._clients:
                self._clients.remove(q)

    def _broadcast(self, message: dict) -> None:
        with self._lock:
            stale = []
            for q in self._clients:
                try:
                    q.put_nowait(message)
                except queue.Full:
                    stale.append(q)
            for q in stale:
                self._clients.remove(q)
                self._dropped_clients += 1
        if stale:
            log.warning("dropped %d slow telemetry client(s)", len(stale))
