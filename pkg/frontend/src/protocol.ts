// Wire types for the gateway WebSocket JSON schema. The "type" field
// discriminates; anything unrecognized is ignored by the console.

export type Triple = [number, number, number];

export interface TwinState {
  position: Triple;
  velocity: Triple;
  attitude: Triple; // roll, pitch, yaw (rad)
}

export interface TelemetrySnapshot {
  type: "telemetry";
  t: number;
  digital: TwinState;
  physical: TwinState;
  offboard: "inactive" | "active" | "lost";
  active_command: { velocity: Triple; clamped: boolean };
  clamp_events: number;
  frames_sent: number;
}

export interface CommandAck {
  type: "ack";
  accepted: boolean;
  velocity: Triple;
  yaw_rate: number;
  clamped: boolean;
  reason: string | null;
}

export interface SessionEvent {
  type: "event";
  event: "start" | "stop" | "error";
  detail?: string;
}

export type GatewayMessage = TelemetrySnapshot | CommandAck | SessionEvent;

export interface CommandRequest {
  type: "command";
  velocity: Triple;
  yaw_rate: number;
}

export function parseGatewayMessage(raw: string): GatewayMessage | null {
  let parsed: unknown;
  try {
    parsed = JSON.parse(raw);
  } catch {
    return null;
  }
  if (typeof parsed !== "object" || parsed === null) return null;
  const kind = (parsed as { type?: string }).type;
  if (kind === "telemetry" || kind === "ack" || kind === "event") {
    return parsed as GatewayMessage;
  }
  return null;
}
