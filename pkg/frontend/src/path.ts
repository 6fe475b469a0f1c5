/** Pointer-path preparation before submitting a drawn trajectory.
 *
 * The server owns all geometry; the client only tidies the raw pointer
 * samples: clamp into the image rectangle, drop duplicate consecutive
 * samples, and cap the vertex count by even arc-length decimation.
 */

import type { Point } from "./types.js";

export const MAX_TRAJECTORY_POINTS = 64;

export function clampToBounds(points: Point[], width: number, height: number): Point[] {
  return points.map((p) => ({
    x: Math.min(Math.max(p.x, 0), width - 1),
    y: Math.min(Math.max(p.y, 0), height - 1),
  }));
}

function dedupe(points: Point[]): Point[] {
  const out: Point[] = [];
  for (const p of points) {
    const last = out[out.length - 1];
    if (!last || last.x !== p.x || last.y !== p.y) {
      out.push(p);
    }
  }
  return out;
}

/** Resample a polyline to exactly `count` vertices, evenly spaced along
 * its arc length. Keeps endpoints. */
export function resampleByArcLength(points: Point[], count: number): Point[] {
  if (count < 1) throw new Error(`resample count must be >= 1, got ${count}`);
  if (points.length === 0) return [];
  if (points.length === 1 || count === 1) {
    return Array.from({ length: count }, () => ({ ...points[0] }));
  }
  const cumulative = [0];
  for (let i = 1; i < points.length; i++) {
    const dx = points[i].x - points[i - 1].x;
    const dy = points[i].y - points[i - 1].y;
    cumulative.push(cumulative[i - 1] + Math.hypot(dx, dy));
  }
  const total = cumulative[cumulative.length - 1];
  if (total === 0) {
    return Array.from({ length: count }, () => ({ ...points[0] }));
  }
  const out: Point[] = [];
  let seg = 0;
  for (let k = 0; k < count; k++) {
    const target = (total * k) / (count - 1);
    while (seg < points.length - 2 && cumulative[seg + 1] < target) seg++;
    const span = cumulative[seg + 1] - cumulative[seg];
    const t = span > 0 ? (target - cumulative[seg]) / span : 0;
    out.push({
      x: points[seg].x + t * (points[seg + 1].x - points[seg].x),
      y: points[seg].y + t * (points[seg + 1].y - points[seg].y),
    });
  }
  return out;
}

/** Tidy a raw pointer path for submission: <= maxPoints vertices, no
 * consecutive duplicates. Short paths pass through unchanged. */
export function simplifyPath(points: Point[], maxPoints: number = MAX_TRAJECTORY_POINTS): Point[] {
  const clean = dedupe(points);
  if (clean.length <= maxPoints) return clean;
  return resampleByArcLength(clean, maxPoints);
}
