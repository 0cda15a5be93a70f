// Gateway connection management and the command channel.
//
// Reconnects with capped exponential backoff when the socket drops.
// Velocity commands repeat at 5 Hz while held; releasing the stick (or
// key) immediately sends a zero-velocity command as a dead-man stop.

import type { CommandRequest, GatewayMessage, Triple } from "./protocol.js";
import { parseGatewayMessage } from "./protocol.js";

export interface SocketLike {
  send(data: string): void;
  close(): void;
  onopen: (() => void) | null;
  onclose: (() => void) | null;
  onerror: (() => void) | null;
  onmessage: ((event: { data: string }) => void) | null;
}

export type SocketFactory = (url: string) => SocketLike;

export interface ClientHooks {
  onStatus(status: "connecting" | "connected" | "disconnected" | "error", detail?: string): void;
  onMessage(message: GatewayMessage): void;
}

export const COMMAND_REPEAT_HZ = 5;
export const BACKOFF_BASE_MS = 500;
export const BACKOFF_MAX_MS = 8000;

export function backoffDelayMs(attempt: number): number {
  return Math.min(BACKOFF_BASE_MS * 2 ** attempt, BACKOFF_MAX_MS);
}

interface TimerApi {
  setTimeout(fn: () => void, ms: number): unknown;
  clearTimeout(handle: unknown): void;
  setInterval(fn: () => void, ms: number): unknown;
  clearInterval(handle: unknown): void;
}

export class GatewayClient {
  private socket: SocketLike | null = null;
  private reconnectHandle: unknown = null;
  private repeatHandle: unknown = null;
  private heldCommand: { velocity: Triple; yawRate: number } | null = null;
  private closed = false;
  attempt = 0;

  constructor(
    private readonly url: string,
    private readonly hooks: ClientHooks,
    private readonly factory: SocketFactory,
    private readonly timers: TimerApi = globalThis as unknown as TimerApi,
  ) {}

  connect(): void {
    this.closed = false;
    this.open();
  }

  private open(): void {
    this.hooks.onStatus("connecting", this.attempt > 0 ? `retry ${this.attempt}` : "");
    const socket = this.factory(this.url);
    this.socket = socket;
    socket.onopen = () => {
      this.attempt = 0;
      this.hooks.onStatus("connected");
    };
    socket.onmessage = (event) => {
      const message = parseGatewayMessage(event.data);
      if (message !== null) {
        this.hooks.onMessage(message);
      }
    };
    socket.onerror = () => {
      this.hooks.onStatus("error", "socket error");
    };
    socket.onclose = () => {
      this.socket = null;
      if (this.closed) return;
      this.hooks.onStatus("disconnected", "connection lost");
      this.scheduleReconnect();
    };
  }

  private scheduleReconnect(): void {
    const delay = backoffDelayMs(this.attempt);
    this.attempt += 1;
    this.reconnectHandle = this.timers.setTimeout(() => this.open(), delay);
  }

  close(): void {
    this.closed = true;
    if (this.reconnectHandle !== null) {
      this.timers.clearTimeout(this.reconnectHandle);
      this.reconnectHandle = null;
    }
    this.releaseCommand();
    this.socket?.close();
    this.socket = null;
    this.hooks.onStatus("disconnected");
  }

  get connected(): boolean {
    return this.socket !== null;
  }

  sendCommand(velocity: Triple, yawRate = 0): boolean {
    if (this.socket === null) return false;
    const request: CommandRequest = { type: "command", velocity, yaw_rate: yawRate };
    this.socket.send(JSON.stringify(request));
    return true;
  }

  // Hold semantics: send now, then repeat until released.
  holdCommand(velocity: Triple, yawRate = 0): void {
    this.heldCommand = { velocity, yawRate };
    this.sendCommand(velocity, yawRate);
    if (this.repeatHandle === null) {
      this.repeatHandle = this.timers.setInterval(() => {
        if (this.heldCommand !== null) {
          this.sendCommand(this.heldCommand.velocity, this.heldCommand.yawRate);
        }
      }, 1000 / COMMAND_REPEAT_HZ);
    }
  }

  releaseCommand(): void {
    if (this.repeatHandle !== null) {
      this.timers.clearInterval(this.repeatHandle);
      this.repeatHandle = null;
    }
    if (this.heldCommand !== null) {
      this.heldCommand = null;
      this.sendCommand([0, 0, 0], 0); // dead-man stop
    }
  }
}
