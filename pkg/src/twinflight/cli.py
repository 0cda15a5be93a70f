"""Command-line entry points for the database, simulation, and teleop pipelines.

Exit codes: 0 success, 2 usage or input error, 3 runtime failure. Every
run writes a manifest (command, arguments, seed, output checksums) so a
rerun with the same inputs can be verified bit-for-bit.
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
import os
import sys
from pathlib import Path

import click

from . import __version__
from .aero.io import DatabaseFormatError, load_database, save_database
from .bridge.link import BridgeConfig
from .bridge.metrics import InsufficientOverlapError
from .bridge.session import CommandScript, SessionConfig, TeleopSession
from .bridge.transport import FaultProfile, UdpTwinLink
from .fusion.datasets import load_dataset, save_dataset
from .fusion.emulators import (
    HF_SAMPLE_COUNT,
    LF_SAMPLE_COUNT,
    LF_TOOLS,
    generate_dataset,
    truth_database,
)
from .fusion.kriging import FitError, FusionConfig
from .fusion.pipeline import fuse_aerodb
from .propulsion import ThrustCurve, max_thrust
from .sim.mission import MissionProfile, square_pattern
from .sim.simulator import SimConfig, SimulationHalt, Simulator, run_mission, write_telemetry_jsonl
from .sim.studies import fidelity_comparison, write_comparison_json

log = logging.getLogger("twinflight")

EXIT_INPUT = 2
EXIT_RUNTIME = 3


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def write_manifest(out_dir: Path, command: str, args: dict, seed: int | None) -> None:
    outputs = {}
    for path in sorted(out_dir.rglob("*")):
        if path.is_file() and path.name != "manifest.json":
            outputs[str(path.relative_to(out_dir))] = _sha256(path)
    manifest = {
        "command": command,
        "args": {k: v for k, v in sorted(args.items())},
        "seed": seed,
        "outputs": outputs,
        "version": __version__,
    }
    with open(out_dir / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _parse_grid(spec: str) -> dict[str, list[float]]:
    grids: dict[str, list[float]] = {}
    try:
        for part in spec.split(","):
            name, lo, hi, count = part.split(":")
            n = int(count)
            lo_f, hi_f = float(lo), float(hi)
            if n < 2 or hi_f <= lo_f:
                raise ValueError(part)
            step = (hi_f - lo_f) / (n - 1)
            grids[name] = [lo_f + i * step for i in range(n)]
    except ValueError as exc:
        raise click.UsageError(
            f"bad grid spec {spec!r}; expected name:lo:hi:count[,...]"
        ) from exc
    if set(grids) != {"alpha", "beta"}:
        raise click.UsageError("grid spec must define exactly alpha and beta")
    return grids


@click.group()
@click.version_option(__version__)
def main() -> None:
    """Digital-twin simulator tooling: fuse, simulate, teleop, thrust."""
    level = os.environ.get("VDT_LOG_LEVEL", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")


@main.command()
@click.option("--out", "out_dir", required=True, type=click.Path(path_type=Path))
@click.option("--seed", default=2024, show_default=True)
@click.option("--lf-samples", default=LF_SAMPLE_COUNT, show_default=True)
@click.option("--hf-samples", default=HF_SAMPLE_COUNT, show_default=True)
def datasets(out_dir: Path, seed: int, lf_samples: int, hf_samples: int) -> None:
    """Generate the synthetic multi-fidelity sample campaign."""
    out_dir.mkdir(parents=True, exist_ok=True)
    save_dataset(generate_dataset("cfd", hf_samples, seed), out_dir / "cfd.csv")
    for i, tool in enumerate(LF_TOOLS):
        save_dataset(generate_dataset(tool, lf_samples, seed + 1 + i), out_dir / f"{tool}.csv")
    write_manifest(out_dir, "datasets", {"lf_samples": lf_samples, "hf_samples": hf_samples}, seed)
    click.echo(f"wrote {1 + len(LF_TOOLS)} datasets to {out_dir}")


@main.command()
@click.argument("hf_file", type=click.Path(path_type=Path))
@click.argument("lf_files", nargs=-1, required=True, type=click.Path(path_type=Path))
@click.option("--grid", "grid_spec", default="alpha:-20:30:26,beta:0:20:11", show_default=True)
@click.option("--out", "out_dir", required=True, type=click.Path(path_type=Path))
@click.option("--seed", default=0, show_default=True)
@click.option("--budget", default=40, show_default=True, help="likelihood evaluations per fit")
def fuse(hf_file: Path, lf_files: tuple[Path, ...], grid_spec: str, out_dir: Path,
         seed: int, budget: int) -> None:
    """Fuse one HF dataset with LF datasets into an aero database."""
    grids = _parse_grid(grid_spec)
    try:
        hf = load_dataset(hf_file)
        lf_list = [load_dataset(p) for p in lf_files]
    except FileNotFoundError as exc:
        raise click.UsageError(str(exc)) from exc
    cfg = FusionConfig(rng_seed=seed, optimizer_budget=budget)
    try:
        db, report = fuse_aerodb(hf, lf_list, grids["alpha"], grids["beta"], cfg)
    except FitError as exc:
        click.echo(f"fusion failed: {exc}", err=True)
        sys.exit(EXIT_RUNTIME)
    out_dir.mkdir(parents=True, exist_ok=True)
    save_database(db, out_dir / "aerodb")
    with open(out_dir / "fusion_report.json", "w", encoding="utf-8") as fh:
        json.dump(report.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    write_manifest(
        out_dir, "fuse",
        {"hf": str(hf_file), "lf": [str(p) for p in lf_files], "grid": grid_spec,
         "budget": budget},
        seed,
    )
    worst = max(report.coefficients.values(), key=lambda c: c.fused_loo_rmse)
    click.echo(
        f"fused {len(report.coefficients)} coefficients; "
        f"worst LOO RMSE {worst.fused_loo_rmse:.4g}"
    )


@main.command()
@click.option("--db", "db_path", type=click.Path(path_type=Path),
              help="aero database directory; a built-in table set is used if omitted")
@click.option("--mission", "mission_file", type=click.Path(path_type=Path))
@click.option("--square", nargs=3, type=float, metavar="SIDE SPEED ALT")
@click.option("--out", "out_dir", required=True, type=click.Path(path_type=Path))
@click.option("--seed", default=0, show_default=True)
@click.option("--dt", default=0.004, show_default=True)
def simulate(db_path: Path | None, mission_file: Path | None,
             square: tuple[float, float, float] | None, out_dir: Path,
             seed: int, dt: float) -> None:
    """Fly a mission closed-loop and write per-tick telemetry."""
    if (mission_file is None) == (square is None or len(square) == 0):
        raise click.UsageError("exactly one of --mission or --square is required")
    try:
        database = load_database(db_path) if db_path else truth_database()
    except DatabaseFormatError as exc:
        click.echo(f"database error: {exc}", err=True)
        sys.exit(EXIT_INPUT)
    if mission_file is not None:
        if not Path(mission_file).exists():
            raise click.UsageError(f"mission file not found: {mission_file}")
        profile = MissionProfile.from_json(str(mission_file))
        target = None
    else:
        side, speed, alt = square
        profile = square_pattern(side, speed, alt)
        target = (0.0, 0.0, -alt)

    sim = Simulator(database=database, config=SimConfig(dt=dt, seed=seed))
    out_dir.mkdir(parents=True, exist_ok=True)
    try:
        records = run_mission(profile, sim)
    except SimulationHalt as halt:
        dump_path = out_dir / "state_dump.json"
        with open(dump_path, "w", encoding="utf-8") as fh:
            json.dump(halt.state_dump, fh, indent=2)
        partial = getattr(halt, "partial_log", [])
        write_telemetry_jsonl(partial, str(out_dir / "telemetry.jsonl"))
        click.echo(f"simulation halted: {halt} (state dump: {dump_path})", err=True)
        sys.exit(EXIT_RUNTIME)
    write_telemetry_jsonl(records, str(out_dir / "telemetry.jsonl"))
    write_manifest(
        out_dir, "simulate",
        {"db": str(db_path) if db_path else None,
         "mission": str(mission_file) if mission_file else None,
         "square": list(square) if square else None, "dt": dt},
        seed,
    )
    end = records[-1].state
    summary = {
        "ticks": len(records),
        "duration_s": round(records[-1].t, 3),
        "aero_clamp_ticks": sim.aero_clamp_count,
    }
    if target is not None:
        err = math.dist((end.pos_n, end.pos_e, end.pos_d), target)
        summary["final_position_error_m"] = round(err, 3)
    click.echo(json.dumps(summary))


@main.command()
@click.option("--duration", default=60.0, show_default=True)
@click.option("--out", "out_dir", required=True, type=click.Path(path_type=Path))
@click.option("--digital-endpoint", default=None, metavar="HOST:PORT")
@click.option("--physical-endpoint", default=None, metavar="HOST:PORT")
@click.option("--gateway", "gateway_addr", default=None, metavar="HOST:PORT",
              help="also serve the live gateway while the session runs")
@click.option("--script", default="square", show_default=True,
              type=click.Choice(["square", "hover"]))
@click.option("--speed", default=2.0, show_default=True)
@click.option("--delay", default=0.0, show_default=True, help="injected one-way delay, s")
@click.option("--loss", default=0.0, show_default=True)
@click.option("--kill-stream-at", default=None, type=float)
@click.option("--rate", default=30.0, show_default=True, help="setpoint stream rate, Hz")
@click.option("--limit", default=3.0, show_default=True, help="velocity clamp, m/s")
@click.option("--seed", default=0, show_default=True)
def teleop(duration: float, out_dir: Path, digital_endpoint: str | None,
           physical_endpoint: str | None, gateway_addr: str | None, script: str,
           speed: float, delay: float, loss: float, kill_stream_at: float | None,
           rate: float, limit: float, seed: int) -> None:
    """Run a digital/physical twin session over the setpoint bridge."""
    link = None
    if (digital_endpoint is None) != (physical_endpoint is None):
        raise click.UsageError("provide both --digital-endpoint and --physical-endpoint or neither")
    if digital_endpoint and physical_endpoint:
        try:
            dhost, dport = digital_endpoint.rsplit(":", 1)
            phost, pport = physical_endpoint.rsplit(":", 1)
            link = UdpTwinLink((dhost, int(dport)), (phost, int(pport)))
        except (ValueError, OSError) as exc:
            click.echo(f"cannot bind endpoints: {exc}", err=True)
            sys.exit(EXIT_RUNTIME)

    if gateway_addr is not None:
        if link is not None:
            raise click.UsageError("--gateway runs on the loopback link; drop the UDP endpoints")
        result = _run_with_gateway(
            gateway_addr, duration, script, speed, delay, loss, kill_stream_at,
            rate, limit, seed,
        )
    else:
        cfg = SessionConfig(
            duration=duration,
            bridge=BridgeConfig(stream_rate=rate, velocity_limit=limit),
            faults=FaultProfile(delay=delay, loss_probability=loss, seed=seed),
            kill_stream_at=kill_stream_at,
            seed=seed,
        )
        cmd_script = CommandScript.square(speed) if script == "square" else CommandScript.hover()
        session = TeleopSession(cfg, database=truth_database(), script=cmd_script, link=link)
        try:
            result = session.run()
        except SimulationHalt as halt:
            click.echo(f"session halted: {halt}", err=True)
            sys.exit(EXIT_RUNTIME)
        finally:
            if link is not None:
                link.close()

    out_dir.mkdir(parents=True, exist_ok=True)
    write_telemetry_jsonl(result.digital_log, str(out_dir / "digital.jsonl"))
    write_telemetry_jsonl(result.physical_log, str(out_dir / "physical.jsonl"))
    try:
        metrics = result.sync_metrics()
        metrics.to_json(str(out_dir / "metrics.json"))
        metrics_summary = {
            "lag_estimate_s": round(metrics.lag_estimate, 4),
            "rms_velocity_error_mps": round(metrics.rms_velocity_error_total, 4),
        }
    except InsufficientOverlapError as exc:
        click.echo(f"sync metrics skipped: {exc}", err=True)
        metrics_summary = {"lag_estimate_s": None, "rms_velocity_error_mps": None}
    events_payload = [{"t": e.t, "kind": e.kind, "detail": e.detail} for e in result.events]
    with open(out_dir / "events.json", "w", encoding="utf-8") as fh:
        json.dump(events_payload, fh, indent=2)
        fh.write("\n")
    write_manifest(
        out_dir, "teleop",
        {"duration": duration, "script": script, "speed": speed, "delay": delay,
         "loss": loss, "kill_stream_at": kill_stream_at, "rate": rate, "limit": limit},
        seed,
    )
    click.echo(json.dumps({
        "frames_sent": result.frames_sent,
        "setpoints_received": result.rx_setpoints.received,
        "clamp_events": result.clamp_events,
        **metrics_summary,
        "events": [e.kind for e in result.events],
    }))


def _run_with_gateway(addr, duration, script, speed, delay, loss, kill_stream_at,
                      rate, limit, seed):
    """Loopback session paced at real time, with the gateway serving it live."""
    import threading
    import time as time_mod

    import uvicorn

    from .service.app import create_app
    from .service.runtime import SessionManager

    host, port = addr.rsplit(":", 1)
    manager = SessionManager()
    app = create_app(manager)
    config = uvicorn.Config(app, host=host, port=int(port), log_level="warning")
    server = uvicorn.Server(config)
    thread = threading.Thread(target=server.run, name="gateway", daemon=True)
    thread.start()
    click.echo(f"gateway live at http://{host}:{port} (console at /console/)", err=True)
    try:
        manager.start(
            duration=duration, script=script, speed=speed, delay=delay, loss=loss,
            kill_stream_at=kill_stream_at, seed=seed, realtime_factor=1.0,
            stream_rate=rate, velocity_limit=limit,
        )
        while manager.running:
            time_mod.sleep(0.2)
    finally:
        manager.stop()
        server.should_exit = True
    session = manager.session
    from .bridge.session import SessionResult

    return SessionResult(
        digital_log=session.digital_log,
        physical_log=session.physical_log,
        send_log=session.send_log,
        events=session.events,
        rx_setpoints=session.rx_setpoints,
        rx_telemetry=session.rx_telemetry,
        frames_sent=session.frames_sent,
        clamp_events=session.clamp_events,
        config=session.config,
    )


@main.command()
@click.option("--inflow", required=True, type=float, help="axial inflow speed, m/s")
def thrust(inflow: float) -> None:
    """Print the maximum rotor thrust at an inflow speed."""
    if inflow < 0:
        click.echo("inflow must be non-negative", err=True)
        sys.exit(EXIT_INPUT)
    click.echo(f"{max_thrust(ThrustCurve(), inflow)}")


@main.command()
@click.option("--db", "db_specs", multiple=True, metavar="NAME=DIR",
              help="database to compare; repeatable. Defaults to built-in truth vs biased tables")
@click.option("--out", "out_dir", required=True, type=click.Path(path_type=Path))
@click.option("--duration", default=12.0, show_default=True)
def fidelity(db_specs: tuple[str, ...], out_dir: Path, duration: float) -> None:
    """Fly the same forward-flight release under different databases."""
    databases = {}
    if db_specs:
        for spec in db_specs:
            if "=" not in spec:
                raise click.UsageError(f"bad --db spec {spec!r}; expected NAME=DIR")
            name, path = spec.split("=", 1)
            try:
                databases[name] = load_database(path)
            except DatabaseFormatError as exc:
                click.echo(f"database error: {exc}", err=True)
                sys.exit(EXIT_INPUT)
    else:
        databases = {"truth": truth_database(), "avl_biased": truth_database(tool="avl")}
    traces = fidelity_comparison(databases, duration=duration)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_comparison_json(traces, str(out_dir / "fidelity.json"))
    summary = {name: round(tr.steady_pitch_deg(), 3) for name, tr in traces.items()}
    click.echo(json.dumps({"steady_pitch_deg": summary}))


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
def serve(host: str, port: int) -> None:
    """Run the gateway service standalone."""
    import uvicorn

    from .service.app import create_app

    uvicorn.run(create_app(), host=host, port=port)


if __name__ == "__main__":
    main()
