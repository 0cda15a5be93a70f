// Plot geometry, kept free of canvas calls so it is directly testable.
// Produces pixel-space polylines for the dual velocity traces, the
// top-down north-east track, and the heading dial.

import type { Sample } from "./history.js";

export interface PlotBox {
  width: number;
  height: number;
  padding: number;
}

export interface Polyline {
  points: Array<{ x: number; y: number }>;
  breaks: number[]; // indices where the line must restart (history gaps)
}

export interface AxisScale {
  tMin: number;
  tMax: number;
  vMin: number;
  vMax: number;
}

export function sharedScale(
  digital: Sample[],
  physical: Sample[],
  axis: 0 | 1 | 2,
  minSpan = 1.0,
): AxisScale {
  const all = [...digital, ...physical];
  if (all.length === 0) {
    return { tMin: 0, tMax: 1, vMin: -minSpan / 2, vMax: minSpan / 2 };
  }
  const tMin = Math.min(...all.map((s) => s.t));
  const tMax = Math.max(...all.map((s) => s.t));
  let vMin = Math.min(...all.map((s) => s.velocity[axis]));
  let vMax = Math.max(...all.map((s) => s.velocity[axis]));
  if (vMax - vMin < minSpan) {
    const mid = (vMin + vMax) / 2;
    vMin = mid - minSpan / 2;
    vMax = mid + minSpan / 2;
  }
  return { tMin, tMax: Math.max(tMax, tMin + 1e-6), vMin, vMax };
}

export function velocityPolyline(
  samples: Sample[],
  axis: 0 | 1 | 2,
  scale: AxisScale,
  box: PlotBox,
): Polyline {
  const innerW = box.width - 2 * box.padding;
  const innerH = box.height - 2 * box.padding;
  const points = samples.map((s) => ({
    x: box.padding + ((s.t - scale.tMin) / (scale.tMax - scale.tMin)) * innerW,
    y: box.padding + (1 - (s.velocity[axis] - scale.vMin) / (scale.vMax - scale.vMin)) * innerH,
  }));
  const breaks = samples
    .map((s, i) => (s.gapBefore ? i : -1))
    .filter((i) => i > 0);
  return { points, breaks };
}

// Markers on the commanded-velocity trace wherever the gateway reported
// the command as clamped.
export function clampMarkers(
  samples: Sample[],
  axis: 0 | 1 | 2,
  scale: AxisScale,
  box: PlotBox,
): Array<{ x: number; y: number }> {
  const innerW = box.width - 2 * box.padding;
  const innerH = box.height - 2 * box.padding;
  return samples
    .filter((s) => s.clamped)
    .map((s) => ({
      x: box.padding + ((s.t - scale.tMin) / (scale.tMax - scale.tMin)) * innerW,
      y:
        box.padding +
        (1 - (s.commandVelocity[axis] - scale.vMin) / (scale.vMax - scale.vMin)) * innerH,
    }));
}

// Mean horizontal pixel offset between two traces of the same motion; a
// physically delayed twin shows up as a positive shift of its polyline.
export function horizontalOffset(a: Polyline, b: Polyline): number {
  const n = Math.min(a.points.length, b.points.length);
  if (n === 0) return 0;
  // Compare at equal v-levels on the steepest common span: use the time
  // of crossing the midline as a robust single-feature estimate.
  const midY = (bounds(a).concat(bounds(b)).reduce((s, v) => s + v, 0)) / 4;
  const ax = crossingX(a, midY);
  const bx = crossingX(b, midY);
  if (ax === null || bx === null) return 0;
  return bx - ax;
}

function bounds(line: Polyline): [number, number] {
  const ys = line.points.map((p) => p.y);
  return [Math.min(...ys), Math.max(...ys)];
}

function crossingX(line: Polyline, level: number): number | null {
  for (let i = 1; i < line.points.length; i++) {
    const a = line.points[i - 1];
    const b = line.points[i];
    if ((a.y - level) * (b.y - level) <= 0 && a.y !== b.y) {
      const t = (level - a.y) / (b.y - a.y);
      return a.x + t * (b.x - a.x);
    }
  }
  return null;
}

export interface TrackView {
  digital: Polyline;
  physical: Polyline;
  scale: { nMin: number; nMax: number; eMin: number; eMax: number };
}

// Top-down track: north up, east right.
export function topDownTrack(
  digital: Sample[],
  physical: Sample[],
  box: PlotBox,
  minSpan = 2.0,
): TrackView {
  const all = [...digital, ...physical];
  let nMin = Math.min(0, ...all.map((s) => s.position[0]));
  let nMax = Math.max(0, ...all.map((s) => s.position[0]));
  let eMin = Math.min(0, ...all.map((s) => s.position[1]));
  let eMax = Math.max(0, ...all.map((s) => s.position[1]));
  const span = Math.max(nMax - nMin, eMax - eMin, minSpan);
  const nMid = (nMin + nMax) / 2;
  const eMid = (eMin + eMax) / 2;
  nMin = nMid - span / 2;
  nMax = nMid + span / 2;
  eMin = eMid - span / 2;
  eMax = eMid + span / 2;
  const innerW = box.width - 2 * box.padding;
  const innerH = box.height - 2 * box.padding;
  const project = (samples: Sample[]): Polyline => ({
    points: samples.map((s) => ({
      x: box.padding + ((s.position[1] - eMin) / (eMax - eMin)) * innerW,
      y: box.padding + (1 - (s.position[0] - nMin) / (nMax - nMin)) * innerH,
    })),
    breaks: samples.map((s, i) => (s.gapBefore ? i : -1)).filter((i) => i > 0),
  });
  return {
    digital: project(digital),
    physical: project(physical),
    scale: { nMin, nMax, eMin, eMax },
  };
}

// Needle endpoint for a heading dial of the given radius; heading 0 is
// north (up), positive clockwise.
export function headingNeedle(
  heading: number,
  cx: number,
  cy: number,
  radius: number,
): { x: number; y: number } {
  return {
    x: cx + radius * Math.sin(heading),
    y: cy - radius * Math.cos(heading),
  };
}
