/** Canvas overlay drawing. Kept free of DOM lookups so the logic is
 * testable with a stub 2D context. */

import type { Overlay } from "./state.js";
import type { Point } from "./types.js";

export interface Stroke {
  color: string;
  width: number;
  points: Point[];
  endpointRadius: number;
}

/** Flatten overlays (and the stroke being drawn, if any) into primitives. */
export function overlayStrokes(
  overlays: Overlay[],
  inProgress: { points: Point[] } | null,
): Stroke[] {
  const strokes: Stroke[] = overlays.map((o) => ({
    color: o.cssColor,
    width: 2,
    points: o.points,
    endpointRadius: 4,
  }));
  if (inProgress && inProgress.points.length > 0) {
    strokes.push({
      color: "rgba(255, 255, 255, 0.9)",
      width: 1.5,
      points: inProgress.points,
      endpointRadius: 3,
    });
  }
  return strokes;
}

export interface Context2DLike {
  clearRect(x: number, y: number, w: number, h: number): void;
  beginPath(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  stroke(): void;
  fill(): void;
  strokeStyle: string | unknown;
  fillStyle: string | unknown;
  lineWidth: number;
}

export function drawStrokes(
  ctx: Context2DLike,
  width: number,
  height: number,
  strokes: Stroke[],
): void {
  ctx.clearRect(0, 0, width, height);
  for (const s of strokes) {
    if (s.points.length === 0) continue;
    ctx.strokeStyle = s.color;
    ctx.fillStyle = s.color;
    ctx.lineWidth = s.width;
    ctx.beginPath();
    ctx.moveTo(s.points[0].x, s.points[0].y);
    for (const p of s.points.slice(1)) ctx.lineTo(p.x, p.y);
    ctx.stroke();
    // start marker so single-click trajectories stay visible
    ctx.beginPath();
    ctx.arc(s.points[0].x, s.points[0].y, s.endpointRadius, 0, Math.PI * 2);
    ctx.fill();
  }
}
