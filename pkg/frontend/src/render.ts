// Canvas drawing for the sync view. All geometry comes from traces.ts.

import type { Sample } from "./history.js";
import {
  clampMarkers,
  headingNeedle,
  sharedScale,
  topDownTrack,
  velocityPolyline,
  type PlotBox,
  type Polyline,
} from "./traces.js";

const DIGITAL_COLOR = "#4fc3f7";
const PHYSICAL_COLOR = "#ffb74d";
const CLAMP_COLOR = "#ef5350";
const GRID_COLOR = "#333a44";

function drawPolyline(ctx: CanvasRenderingContext2D, line: Polyline, color: string): void {
  if (line.points.length < 2) return;
  const breakSet = new Set(line.breaks);
  ctx.strokeStyle = color;
  ctx.lineWidth = 1.5;
  ctx.beginPath();
  line.points.forEach((p, i) => {
    if (i === 0 || breakSet.has(i)) {
      ctx.moveTo(p.x, p.y);
    } else {
      ctx.lineTo(p.x, p.y);
    }
  });
  ctx.stroke();
}

export function drawVelocityAxis(
  canvas: HTMLCanvasElement,
  digital: Sample[],
  physical: Sample[],
  axis: 0 | 1 | 2,
  label: string,
): void {
  const ctx = canvas.getContext("2d");
  if (ctx === null) return;
  const box: PlotBox = { width: canvas.width, height: canvas.height, padding: 18 };
  ctx.clearRect(0, 0, box.width, box.height);
  ctx.strokeStyle = GRID_COLOR;
  ctx.strokeRect(box.padding, box.padding, box.width - 2 * box.padding, box.height - 2 * box.padding);

  const scale = sharedScale(digital, physical, axis);
  drawPolyline(ctx, velocityPolyline(digital, axis, scale, box), DIGITAL_COLOR);
  drawPolyline(ctx, velocityPolyline(physical, axis, scale, box), PHYSICAL_COLOR);

  ctx.fillStyle = CLAMP_COLOR;
  for (const marker of clampMarkers(digital, axis, scale, box)) {
    ctx.beginPath();
    ctx.arc(marker.x, marker.y, 2.5, 0, 2 * Math.PI);
    ctx.fill();
  }

  ctx.fillStyle = "#9aa4b0";
  ctx.font = "11px monospace";
  ctx.fillText(
    `${label}  [${scale.vMin.toFixed(1)}, ${scale.vMax.toFixed(1)}] m/s`,
    box.padding + 4,
    box.padding - 5,
  );
}

export function drawTrack(
  canvas: HTMLCanvasElement,
  digital: Sample[],
  physical: Sample[],
): void {
  const ctx = canvas.getContext("2d");
  if (ctx === null) return;
  const box: PlotBox = { width: canvas.width, height: canvas.height, padding: 18 };
  ctx.clearRect(0, 0, box.width, box.height);
  ctx.strokeStyle = GRID_COLOR;
  ctx.strokeRect(box.padding, box.padding, box.width - 2 * box.padding, box.height - 2 * box.padding);
  const view = topDownTrack(digital, physical, box);
  drawPolyline(ctx, view.digital, DIGITAL_COLOR);
  drawPolyline(ctx, view.physical, PHYSICAL_COLOR);
  ctx.fillStyle = "#9aa4b0";
  ctx.font = "11px monospace";
  ctx.fillText("N/E track", box.padding + 4, box.padding - 5);
}

export function drawHeadingDial(
  canvas: HTMLCanvasElement,
  digitalHeading: number | undefined,
  physicalHeading: number | undefined,
): void {
  const ctx = canvas.getContext("2d");
  if (ctx === null) return;
  const cx = canvas.width / 2;
  const cy = canvas.height / 2;
  const radius = Math.min(cx, cy) - 8;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.strokeStyle = GRID_COLOR;
  ctx.beginPath();
  ctx.arc(cx, cy, radius, 0, 2 * Math.PI);
  ctx.stroke();
  ctx.fillStyle = "#9aa4b0";
  ctx.font = "10px monospace";
  ctx.fillText("N", cx - 3, cy - radius + 12);

  const needles: Array<[number | undefined, string]> = [
    [digitalHeading, DIGITAL_COLOR],
    [physicalHeading, PHYSICAL_COLOR],
  ];
  for (const [heading, color] of needles) {
    if (heading === undefined) continue;
    const tip = headingNeedle(heading, cx, cy, radius - 6);
    ctx.strokeStyle = color;
    ctx.lineWidth = 2;
    ctx.beginPath();
    ctx.moveTo(cx, cy);
    ctx.lineTo(tip.x, tip.y);
    ctx.stroke();
  }
}
