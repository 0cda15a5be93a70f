"""FastAPI gateway: live telemetry and command endpoint for the session.

Surfaces:
  GET  /health            liveness and session state
  POST /session/start     begin a loopback teleop session
  POST /session/stop      end it
  POST /session/command   inject one operator velocity command
  GET  /session/metrics   twin-sync metrics to date
  GET  /thrust            max-thrust curve query
  WS   /session           10 Hz telemetry stream + command channel
                          (JSON messages with a "type" discriminator)
"""

from __future__ import annotations

import asyncio
import queue
from pathlib import Path

from fastapi import FastAPI, HTTPException, Query, WebSocket, WebSocketDisconnect
from fastapi.staticfiles import StaticFiles

from ..bridge.metrics import InsufficientOverlapError
from ..propulsion import ThrustCurve, max_thrust
from .runtime import SessionManager
from .schemas import (
    CommandAck,
    CommandRequest,
    HealthResponse,
    SessionStartRequest,
    SessionStartResponse,
    ThrustResponse,
)

CONSOLE_DIST = Path(__file__).resolve().parents[3] / "frontend" / "dist"


def create_app(manager: SessionManager | None = None) -> FastAPI:
    manager = manager or SessionManager()
    app = FastAPI(title="twinflight gateway", version="0.1.0")
    app.state.manager = manager
    curve = ThrustCurve()

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        session = manager.session
        return HealthResponse(
            status="ok",
            session_running=manager.running,
            session_time=session.time if session else 0.0,
        )

    @app.post("/session/start", response_model=SessionStartResponse)
    def session_start(req: SessionStartRequest) -> SessionStartResponse:
        try:
            manager.start(
                duration=req.duration,
                script=req.script,
                speed=req.speed,
                delay=req.delay,
                loss=req.loss,
                kill_stream_at=req.kill_stream_at,
                seed=req.seed,
                realtime_factor=req.realtime_factor,
            )
        except RuntimeError as exc:
            raise HTTPException(status_code=409, detail=str(exc)) from exc
        return SessionStartResponse(started=True)

    @app.post("/session/stop", response_model=SessionStartResponse)
    def session_stop() -> SessionStartResponse:
        manager.stop()
        return SessionStartResponse(started=False, detail="stopped")

    @app.post("/session/command", response_model=CommandAck)
    def session_command(req: CommandRequest) -> CommandAck:
        try:
            velocity, clamped = manager.command(tuple(req.velocity), req.yaw_rate)
        except RuntimeError as exc:
            return CommandAck(accepted=False, reason=str(exc))
        return CommandAck(
            accepted=True, velocity=velocity, yaw_rate=req.yaw_rate, clamped=clamped
        )

    @app.get("/session/metrics")
    def session_metrics() -> dict:
        try:
            return manager.metrics()
        except RuntimeError as exc:
            raise HTTPException(status_code=409, detail=str(exc)) from exc
        except InsufficientOverlapError as exc:
            raise HTTPException(status_code=409, detail=str(exc)) from exc

    @app.get("/thrust", response_model=ThrustResponse)
    def thrust(inflow: float = Query(ge=0.0)) -> ThrustResponse:
        return ThrustResponse(inflow=inflow, max_thrust=max_thrust(curve, inflow))

    @app.websocket("/session")
    async def session_ws(ws: WebSocket) -> None:
        await ws.accept()
        q = manager.subscribe()

        async def pump_outbound() -> None:
            while True:
                try:
                    msg = q.get_nowait()
                except queue.Empty:
                    await asyncio.sleep(0.02)
                    continue
                await ws.send_json(msg)

        async def pump_inbound() -> None:
            while True:
                raw = await ws.receive_json()
                if raw.get("type") == "command":
                    try:
                        req = CommandRequest(
                            velocity=tuple(raw.get("velocity", (0, 0, 0))),
                            yaw_rate=raw.get("yaw_rate", 0.0),
                        )
                        velocity, clamped = manager.command(
                            tuple(req.velocity), req.yaw_rate
                        )
                        ack = CommandAck(
                            accepted=True, velocity=velocity,
                            yaw_rate=req.yaw_rate, clamped=clamped,
                        )
                    except (RuntimeError, ValueError) as exc:
                        ack = CommandAck(accepted=False, reason=str(exc))
                    await ws.send_json({"type": "ack", **ack.model_dump()})

        try:
            outbound = asyncio.create_task(pump_outbound())
            inbound = asyncio.create_task(pump_inbound())
            done, pending = await asyncio.wait(
                {outbound, inbound}, return_when=asyncio.FIRST_EXCEPTION
            )
            for task in pending:
                task.cancel()
            for task in done:
                exc = task.exception()
                if exc is not None and not isinstance(exc, WebSocketDisconnect):
                    raise exc
        except WebSocketDisconnect:
            pass
        finally:
            manager.unsubscribe(q)

    if CONSOLE_DIST.is_dir():
        app.mount("/console", StaticFiles(directory=CONSOLE_DIST, html=True), name="console")

    return app
