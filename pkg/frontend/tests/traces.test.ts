import { describe, expect, it } from "vitest";

import type { Sample } from "../src/history.js";
import {
  clampMarkers,
  headingNeedle,
  horizontalOffset,
  sharedScale,
  topDownTrack,
  velocityPolyline,
} from "../src/traces.js";

const BOX = { width: 400, height: 150, padding: 10 };

function ramp(tOffset: number, clampedAt: number[] = []): Sample[] {
  // Velocity ramps 0 -> 2 m/s between t = 5 and t = 7, shifted by tOffset.
  const samples: Sample[] = [];
  for (let i = 0; i < 120; i++) {
    const t = i / 10;
    const ts = t - tOffset;
    const v = ts < 5 ? 0 : ts > 7 ? 2 : (ts - 5);
    samples.push({
      t,
      velocity: [v, 0, 0],
      position: [v * t * 0.5, 0, -10],
      heading: 0,
      commandVelocity: [2, 0, 0],
      clamped: clampedAt.includes(i),
      gapBefore: false,
    });
  }
  return samples;
}

describe("velocity traces", () => {
  it("identical traces overlap exactly", () => {
    const digital = ramp(0);
    const physical = ramp(0);
    const scale = sharedScale(digital, physical, 0);
    const a = velocityPolyline(digital, 0, scale, BOX);
    const b = velocityPolyline(physical, 0, scale, BOX);
    expect(horizontalOffset(a, b)).toBeCloseTo(0, 6);
    expect(a.points).toEqual(b.points);
  });

  it("a delayed physical trace shows a visible horizontal offset", () => {
    const digital = ramp(0);
    const physical = ramp(0.5); // half-second lag
    const scale = sharedScale(digital, physical, 0);
    const a = velocityPolyline(digital, 0, scale, BOX);
    const b = velocityPolyline(physical, 0, scale, BOX);
    const offset = horizontalOffset(a, b);
    // 0.5 s over a 12 s window across ~380 px of plot width.
    const expected = (0.5 / 12) * (BOX.width - 2 * BOX.padding);
    expect(offset).toBeGreaterThan(expected * 0.6);
    expect(offset).toBeLessThan(expected * 1.4);
  });

  it("gap indices break the polyline", () => {
    const digital = ramp(0);
    digital[60] = { ...digital[60], gapBefore: true };
    const scale = sharedScale(digital, digital, 0);
    const line = velocityPolyline(digital, 0, scale, BOX);
    expect(line.breaks).toContain(60);
  });

  it("clamp events become markers on the commanded trace", () => {
    const digital = ramp(0, [30, 31, 32]);
    const scale = sharedScale(digital, digital, 0);
    const markers = clampMarkers(digital, 0, scale, BOX);
    expect(markers.length).toBe(3);
    for (const marker of markers) {
      expect(marker.x).toBeGreaterThanOrEqual(BOX.padding);
      expect(marker.x).toBeLessThanOrEqual(BOX.width - BOX.padding);
    }
  });

  it("empty history still produces a usable scale", () => {
    const scale = sharedScale([], [], 0);
    expect(scale.vMax).toBeGreaterThan(scale.vMin);
  });
});

describe("top-down track", () => {
  it("keeps both twins inside the box and square-scaled", () => {
    const digital = ramp(0);
    const physical = ramp(0.5);
    const view = topDownTrack(digital, physical, { width: 260, height: 260, padding: 10 });
    for (const line of [view.digital, view.physical]) {
      for (const p of line.points) {
        expect(p.x).toBeGreaterThanOrEqual(10 - 1e-9);
        expect(p.x).toBeLessThanOrEqual(250 + 1e-9);
        expect(p.y).toBeGreaterThanOrEqual(10 - 1e-9);
        expect(p.y).toBeLessThanOrEqual(250 + 1e-9);
      }
    }
    expect(view.scale.nMax - view.scale.nMin).toBeCloseTo(view.scale.eMax - view.scale.eMin);
  });
});

describe("heading dial", () => {
  it("north points up and east points right", () => {
    const north = headingNeedle(0, 50, 50, 40);
    expect(north.x).toBeCloseTo(50);
    expect(north.y).toBeCloseTo(10);
    const east = headingNeedle(Math.PI / 2, 50, 50, 40);
    expect(east.x).toBeCloseTo(90);
    expect(east.y).toBeCloseTo(50);
  });
});
