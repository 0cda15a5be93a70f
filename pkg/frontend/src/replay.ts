// Replay mode: load a digital/physical telemetry JSONL pair (as written
// by the simulator) and scrub through it, feeding the same history
// structures the live view uses.

import { SyncHistory } from "./history.js";
import type { TelemetrySnapshot, Triple } from "./protocol.js";

interface TelemetryLine {
  t: number;
  vel_ned: Triple;
  state: {
    pos_n: number;
    pos_e: number;
    pos_d: number;
    phi: number;
    theta: number;
    psi: number;
  };
  setpoint: { velocity: Triple } | null;
}

export function parseJsonl(text: string): TelemetryLine[] {
  const out: TelemetryLine[] = [];
  for (const line of text.split("\n")) {
    const trimmed = line.trim();
    if (trimmed.length === 0) continue;
    try {
      out.push(JSON.parse(trimmed) as TelemetryLine);
    } catch {
      // Skip malformed lines; partial logs from halted runs end mid-write.
    }
  }
  return out;
}

export class ReplaySession {
  readonly duration: number;
  private cursorT = 0;

  constructor(
    private readonly digital: TelemetryLine[],
    private readonly physical: TelemetryLine[],
    private readonly stride = 25, // 250 Hz logs decimated to the 10 Hz view
  ) {
    const last = this.digital[this.digital.length - 1];
    this.duration = last ? last.t : 0;
  }

  static fromText(digitalText: string, physicalText: string): ReplaySession {
    return new ReplaySession(parseJsonl(digitalText), parseJsonl(physicalText));
  }

  // Rebuild history up to the scrub position.
  scrubTo(t: number): SyncHistory {
    this.cursorT = Math.max(0, Math.min(t, this.duration));
    const history = new SyncHistory();
    for (let i = 0; i < this.digital.length; i += this.stride) {
      const d = this.digital[i];
      const p = this.physical[Math.min(i, this.physical.length - 1)];
      if (d.t > this.cursorT) break;
      history.record(toSnapshot(d, p));
    }
    return history;
  }

  get cursor(): number {
    return this.cursorT;
  }
}

function toSnapshot(d: TelemetryLine, p: TelemetryLine): TelemetrySnapshot {
  return {
    type: "telemetry",
    t: d.t,
    digital: {
      position: [d.state.pos_n, d.state.pos_e, d.state.pos_d],
      velocity: d.vel_ned,
      attitude: [d.state.phi, d.state.theta, d.state.psi],
    },
    physical: {
      position: [p.state.pos_n, p.state.pos_e, p.state.pos_d],
      velocity: p.vel_ned,
      attitude: [p.state.phi, p.state.theta, p.state.psi],
    },
    offboard: "active",
    active_command: {
      velocity: d.setpoint ? d.setpoint.velocity : [0, 0, 0],
      clamped: false,
    },
    clamp_events: 0,
    frames_sent: 0,
  };
}
