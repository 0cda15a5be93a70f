// Console-wide state: connection status, the latest snapshot, the last
// command acknowledgment, and the rolling sync history. Only acked values
// are ever shown as the active command; the console never fabricates a
// setpoint client-side.

import { SyncHistory } from "./history.js";
import type { CommandAck, GatewayMessage, TelemetrySnapshot, Triple } from "./protocol.js";

export type ConnectionStatus = "disconnected" | "connecting" | "connected" | "error";

export interface AckDisplay {
  velocity: Triple;
  yawRate: number;
  clamped: boolean;
  rejected: boolean;
  reason: string | null;
  at: number; // ms timestamp for fade-out
}

export class ConsoleState {
  status: ConnectionStatus = "disconnected";
  statusDetail = "";
  latest: TelemetrySnapshot | null = null;
  lastAck: AckDisplay | null = null;
  history = new SyncHistory();
  retryCount = 0;

  setStatus(status: ConnectionStatus, detail = ""): void {
    if (status === "connected" && this.status !== "connected" && this.latest !== null) {
      // Rejoining an existing session: mark the outage in the traces.
      this.history.markGap();
    }
    this.status = status;
    this.statusDetail = detail;
    if (status === "connected") {
      this.retryCount = 0;
    }
  }

  handleMessage(message: GatewayMessage, nowMs: number): void {
    if (message.type === "telemetry") {
      this.latest = message;
      this.history.record(message);
    } else if (message.type === "ack") {
      this.lastAck = ackDisplay(message, nowMs);
    } else if (message.type === "event" && message.event === "error") {
      this.statusDetail = message.detail ?? "session error";
    }
  }

  // The command shown as active is whatever the gateway last confirmed.
  activeCommand(): { velocity: Triple; clamped: boolean } | null {
    if (this.latest === null) return null;
    return this.latest.active_command;
  }

  offboardLost(): boolean {
    return this.latest?.offboard === "lost";
  }
}

function ackDisplay(ack: CommandAck, nowMs: number): AckDisplay {
  return {
    velocity: ack.velocity,
    yawRate: ack.yaw_rate,
    clamped: ack.clamped,
    rejected: !ack.accepted,
    reason: ack.reason,
    at: nowMs,
  };
}
