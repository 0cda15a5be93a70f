// End-to-end console loop against the scripted gateway stand-in, run on
// real timers: a command entered through the client must be acked and
// appear in the next telemetry snapshot's active setpoint within 200 ms,
// an over-limit request must render as a clamped 3 m/s ack, and a delayed
// physical twin must show as a horizontal trace offset.

import { describe, expect, it } from "vitest";

import { GatewayClient } from "../src/client.js";
import { ConsoleState } from "../src/state.js";
import { horizontalOffset, sharedScale, velocityPolyline } from "../src/traces.js";
import { FakeGatewaySocket } from "./fakeGateway.js";

function wire(socket: FakeGatewaySocket): { state: ConsoleState; client: GatewayClient } {
  const state = new ConsoleState();
  const client = new GatewayClient(
    "ws://test/session",
    {
      onStatus: (status, detail) => state.setStatus(status, detail ?? ""),
      onMessage: (message) => state.handleMessage(message, Date.now()),
    },
    () => socket,
  );
  client.connect();
  return { state, client };
}

function waitFor(predicate: () => boolean, timeoutMs: number): Promise<number> {
  const started = Date.now();
  return new Promise((resolve, reject) => {
    const poll = () => {
      if (predicate()) {
        resolve(Date.now() - started);
      } else if (Date.now() - started > timeoutMs) {
        reject(new Error("condition not met in time"));
      } else {
        setTimeout(poll, 5);
      }
    };
    poll();
  });
}

describe("console loop on the loopback gateway", () => {
  it("a command appears in the next snapshot's active setpoint within 200 ms", async () => {
    const socket = new FakeGatewaySocket();
    const { state, client } = wire(socket);
    await waitFor(() => state.status === "connected", 500);
    socket.startTelemetry(100);
    await waitFor(() => state.latest !== null, 500);

    client.sendCommand([2, 0, 0]);
    const elapsed = await waitFor(
      () => state.activeCommand()?.velocity[0] === 2,
      1000,
    );
    expect(elapsed).toBeLessThan(200);
    client.close();
  });

  it("a 5 m/s request renders a clamped 3 m/s ack", async () => {
    const socket = new FakeGatewaySocket();
    const { state, client } = wire(socket);
    await waitFor(() => state.status === "connected", 500);
    socket.startTelemetry(100);

    client.sendCommand([5, 0, 0]);
    await waitFor(() => state.lastAck !== null, 500);
    expect(state.lastAck?.clamped).toBe(true);
    expect(state.lastAck?.velocity[0]).toBeCloseTo(3.0);
    // And the gateway-side active setpoint reflects the clamped value.
    await waitFor(() => state.activeCommand()?.velocity[0] === 3, 500);
    expect(state.activeCommand()?.clamped).toBe(true);
    client.close();
  });

  it("an injected physical delay is visible as a trace offset", async () => {
    const socket = new FakeGatewaySocket({ physicalDelaySnapshots: 5 }); // 0.5 s at 10 Hz
    const { state, client } = wire(socket);
    await waitFor(() => state.status === "connected", 500);

    // Hover first, then a velocity step mid-window so both traces show
    // the transition; the physical one lags by the scripted delay.
    for (let i = 0; i < 10; i++) {
      socket.emitTelemetry();
    }
    client.sendCommand([2, 0, 0]);
    for (let i = 0; i < 30; i++) {
      socket.emitTelemetry();
    }
    const digital = state.history.digital.samples;
    const physical = state.history.physical.samples;
    const box = { width: 400, height: 150, padding: 10 };
    const scale = sharedScale(digital, physical, 0);
    const offset = horizontalOffset(
      velocityPolyline(digital, 0, scale, box),
      velocityPolyline(physical, 0, scale, box),
    );
    expect(offset).toBeGreaterThan(5); // clearly visible shift in pixels
    client.close();
  });
});
