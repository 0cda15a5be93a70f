// Rolling per-twin trace storage. Capacity is 30 s at the 10 Hz snapshot
// rate; older samples fall off the front. A session interruption (gateway
// restart, reconnect) is recorded as a gap marker so plots can break the
// line instead of interpolating across the outage.

import type { TelemetrySnapshot, Triple } from "./protocol.js";

export const HISTORY_SECONDS = 30;
export const SNAPSHOT_HZ = 10;
export const CAPACITY = HISTORY_SECONDS * SNAPSHOT_HZ;

export interface Sample {
  t: number;
  velocity: Triple;
  position: Triple;
  heading: number;
  commandVelocity: Triple;
  clamped: boolean;
  gapBefore: boolean;
}

export class TwinHistory {
  readonly samples: Sample[] = [];
  private pendingGap = false;

  markGap(): void {
    this.pendingGap = true;
  }

  push(sample: Omit<Sample, "gapBefore">): void {
    this.samples.push({ ...sample, gapBefore: this.pendingGap });
    this.pendingGap = false;
    while (this.samples.length > CAPACITY) {
      this.samples.shift();
    }
  }

  get length(): number {
    return this.samples.length;
  }

  latest(): Sample | undefined {
    return this.samples[this.samples.length - 1];
  }

  axis(which: 0 | 1 | 2): Array<{ t: number; v: number; gapBefore: boolean }> {
    return this.samples.map((s) => ({ t: s.t, v: s.velocity[which], gapBefore: s.gapBefore }));
  }

  clear(): void {
    this.samples.length = 0;
    this.pendingGap = false;
  }
}

export class SyncHistory {
  readonly digital = new TwinHistory();
  readonly physical = new TwinHistory();

  markGap(): void {
    this.digital.markGap();
    this.physical.markGap();
  }

  record(snapshot: TelemetrySnapshot): void {
    this.digital.push({
      t: snapshot.t,
      velocity: snapshot.digital.velocity,
      position: snapshot.digital.position,
      heading: snapshot.digital.attitude[2],
      commandVelocity: snapshot.active_command.velocity,
      clamped: snapshot.active_command.clamped,
    });
    this.physical.push({
      t: snapshot.t,
      velocity: snapshot.physical.velocity,
      position: snapshot.physical.position,
      heading: snapshot.physical.attitude[2],
      commandVelocity: snapshot.active_command.velocity,
      clamped: snapshot.active_command.clamped,
    });
  }

  clear(): void {
    this.digital.clear();
    this.physical.clear();
  }
}
