// DOM wiring: connect controls, keyboard/on-screen stick, live redraw.

import { GatewayClient } from "./client.js";
import { drawHeadingDial, drawTrack, drawVelocityAxis } from "./render.js";
import { ReplaySession } from "./replay.js";
import { ConsoleState } from "./state.js";
import type { Triple } from "./protocol.js";

const COMMAND_SPEED = 2.0; // m/s per stick direction

const state = new ConsoleState();
let client: GatewayClient | null = null;
let replay: ReplaySession | null = null;

function byId<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (el === null) throw new Error(`missing element #${id}`);
  return el as T;
}

function defaultEndpoint(): string {
  const proto = location.protocol === "https:" ? "wss:" : "ws:";
  return `${proto}//${location.host}/session`;
}

function setStatusBanner(): void {
  const banner = byId<HTMLDivElement>("status");
  banner.textContent = `${state.status}${state.statusDetail ? ` (${state.statusDetail})` : ""}`;
  banner.className = `status ${state.status}`;
}

function setAckBanner(): void {
  const el = byId<HTMLDivElement>("ack");
  const ack = state.lastAck;
  if (ack === null) {
    el.textContent = "no commands sent";
    el.className = "ack";
    return;
  }
  if (ack.rejected) {
    el.textContent = `rejected: ${ack.reason ?? "unknown"}`;
    el.className = "ack rejected";
    return;
  }
  const [vn, ve, vd] = ack.velocity.map((v) => v.toFixed(2));
  el.textContent = `ack: (${vn}, ${ve}, ${vd}) m/s${ack.clamped ? "  [CLAMPED]" : ""}`;
  el.className = ack.clamped ? "ack clamped" : "ack ok";
}

function redraw(): void {
  const digital = state.history.digital.samples;
  const physical = state.history.physical.samples;
  drawVelocityAxis(byId("vx"), digital, physical, 0, "vN");
  drawVelocityAxis(byId("vy"), digital, physical, 1, "vE");
  drawVelocityAxis(byId("vz"), digital, physical, 2, "vD");
  drawTrack(byId("track"), digital, physical);
  drawHeadingDial(
    byId("dial"),
    state.history.digital.latest()?.heading,
    state.history.physical.latest()?.heading,
  );
  const active = state.activeCommand();
  byId<HTMLDivElement>("active").textContent = active
    ? `active setpoint: (${active.velocity.map((v) => v.toFixed(2)).join(", ")})` +
      (active.clamped ? " [clamped]" : "")
    : "no telemetry yet";
  setStatusBanner();
  setAckBanner();
}

function connect(): void {
  const endpoint = byId<HTMLInputElement>("endpoint").value || defaultEndpoint();
  client?.close();
  client = new GatewayClient(
    endpoint,
    {
      onStatus: (status, detail) => {
        state.setStatus(status, detail);
        setStatusBanner();
      },
      onMessage: (message) => {
        state.handleMessage(message, Date.now());
      },
    },
    (url) => new WebSocket(url) as unknown as import("./client.js").SocketLike,
  );
  client.connect();
}

const KEY_DIRECTIONS: Record<string, Triple> = {
  w: [COMMAND_SPEED, 0, 0],
  s: [-COMMAND_SPEED, 0, 0],
  a: [0, -COMMAND_SPEED, 0],
  d: [0, COMMAND_SPEED, 0],
  r: [0, 0, -COMMAND_SPEED],
  f: [0, 0, COMMAND_SPEED],
};

function wireControls(): void {
  byId<HTMLButtonElement>("connect").addEventListener("click", connect);

  document.addEventListener("keydown", (event) => {
    const dir = KEY_DIRECTIONS[event.key];
    if (dir && client && !event.repeat) {
      client.holdCommand(dir);
    }
  });
  document.addEventListener("keyup", (event) => {
    if (KEY_DIRECTIONS[event.key] && client) {
      client.releaseCommand();
    }
  });

  document.querySelectorAll<HTMLButtonElement>("[data-dir]").forEach((button) => {
    const dir = JSON.parse(button.dataset.dir as string) as Triple;
    const hold = () => client?.holdCommand(dir);
    const release = () => client?.releaseCommand();
    button.addEventListener("mousedown", hold);
    button.addEventListener("mouseup", release);
    button.addEventListener("mouseleave", release);
    button.addEventListener("touchstart", hold);
    button.addEventListener("touchend", release);
  });

  const scrub = byId<HTMLInputElement>("scrub");
  scrub.addEventListener("input", () => {
    if (replay === null) return;
    const t = (Number(scrub.value) / 100) * replay.duration;
    state.history = replay.scrubTo(t);
    redraw();
  });

  byId<HTMLInputElement>("replay-files").addEventListener("change", async (event) => {
    const input = event.target as HTMLInputElement;
    if (!input.files || input.files.length !== 2) return;
    const [a, b] = [input.files[0], input.files[1]];
    const digital = a.name.includes("digital") ? a : b;
    const physical = a.name.includes("digital") ? b : a;
    replay = ReplaySession.fromText(await digital.text(), await physical.text());
    byId<HTMLDivElement>("replay-info").textContent =
      `replay loaded: ${replay.duration.toFixed(1)} s`;
  });
}

wireControls();
setInterval(redraw, 100);
