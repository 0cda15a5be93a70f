import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { backoffDelayMs, GatewayClient } from "../src/client.js";
import { ConsoleState } from "../src/state.js";
import { FakeGatewaySocket } from "./fakeGateway.js";

function makeClient(state: ConsoleState) {
  const sockets: FakeGatewaySocket[] = [];
  const client = new GatewayClient(
    "ws://test/session",
    {
      onStatus: (status, detail) => state.setStatus(status, detail ?? ""),
      onMessage: (message) => state.handleMessage(message, Date.now()),
    },
    () => {
      const socket = new FakeGatewaySocket();
      sockets.push(socket);
      return socket;
    },
  );
  return { client, sockets };
}

describe("GatewayClient", () => {
  beforeEach(() => {
    vi.useFakeTimers();
  });
  afterEach(() => {
    vi.useRealTimers();
  });

  it("reaches connected status when the socket opens", async () => {
    const state = new ConsoleState();
    const { client } = makeClient(state);
    client.connect();
    expect(state.status).toBe("connecting");
    await vi.runOnlyPendingTimersAsync();
    expect(state.status).toBe("connected");
    client.close();
  });

  it("reconnects with exponential backoff after a drop", async () => {
    const state = new ConsoleState();
    const { client, sockets } = makeClient(state);
    client.connect();
    await vi.advanceTimersByTimeAsync(1);
    expect(state.status).toBe("connected");

    sockets[0].dropConnection();
    expect(state.status).toBe("disconnected");
    // First retry fires after the base backoff delay.
    await vi.advanceTimersByTimeAsync(backoffDelayMs(0) + 1);
    expect(sockets.length).toBe(2);
    expect(state.status).toBe("connected");
    client.close();
  });

  it("backoff delays grow and cap", () => {
    expect(backoffDelayMs(0)).toBe(500);
    expect(backoffDelayMs(1)).toBe(1000);
    expect(backoffDelayMs(2)).toBe(2000);
    expect(backoffDelayMs(10)).toBe(8000);
  });

  it("repeats a held command at 5 Hz", async () => {
    const state = new ConsoleState();
    const { client, sockets } = makeClient(state);
    client.connect();
    await vi.advanceTimersByTimeAsync(1);
    const socket = sockets[0];

    client.holdCommand([2, 0, 0]);
    await vi.advanceTimersByTimeAsync(1000);
    const commands = socket.sent
      .map((raw) => JSON.parse(raw))
      .filter((m) => m.type === "command" && m.velocity[0] === 2);
    // Initial send plus ~5 repeats per second.
    expect(commands.length).toBeGreaterThanOrEqual(5);
    expect(commands.length).toBeLessThanOrEqual(7);
    client.close();
  });

  it("release sends a zero-velocity dead-man command", async () => {
    const state = new ConsoleState();
    const { client, sockets } = makeClient(state);
    client.connect();
    await vi.advanceTimersByTimeAsync(1);
    const socket = sockets[0];

    client.holdCommand([2, 0, 0]);
    await vi.advanceTimersByTimeAsync(250);
    client.releaseCommand();
    const last = JSON.parse(socket.sent[socket.sent.length - 1]);
    expect(last.velocity).toEqual([0, 0, 0]);
    // No further repeats after release.
    const count = socket.sent.length;
    await vi.advanceTimersByTimeAsync(1000);
    expect(socket.sent.length).toBe(count);
    client.close();
  });

  it("ignores malformed frames", async () => {
    const state = new ConsoleState();
    const { client, sockets } = makeClient(state);
    client.connect();
    await vi.advanceTimersByTimeAsync(1);
    const socket = sockets[0];
    socket.onmessage?.({ data: "{not json" });
    socket.onmessage?.({ data: JSON.stringify({ type: "mystery" }) });
    expect(state.latest).toBeNull();
    client.close();
  });
});
