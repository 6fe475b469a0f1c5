/** Wire types mirroring the rendering service's JSON responses. */

export interface SphereInfo {
  sphere_id: number;
  color: [number, number, number];
}

export interface SessionInfo {
  session_id: string;
  width: number;
  height: number;
  frames: number;
  version: number;
  has_depth_map: boolean;
  spheres: SphereInfo[];
}

export type JobStatus = "pending" | "running" | "done" | "failed";

export interface RenderJobInfo {
  job_id: string;
  scene_version: number;
  start: number;
  end: number;
  status: JobStatus;
  frames: Record<string, boolean>;
  error: string | null;
}

export type Layer = "spheres" | "envelope" | "composite";

export const MOVE_KINDS = [
  "static",
  "pan_left",
  "pan_right",
  "tilt_up",
  "tilt_down",
  "dolly_in",
  "dolly_out",
  "truck_left",
  "truck_right",
  "pedestal_up",
  "pedestal_down",
  "orbit_left",
  "orbit_right",
  "zoom_in",
  "zoom_out",
] as const;

export type MoveKind = (typeof MOVE_KINDS)[number];

export interface MoveSpec {
  kind: MoveKind;
  magnitude: number;
}

export interface Point {
  x: number;
  y: number;
}
