/** Client-side view state. All geometry lives on the server; this tracks
 * what to display: overlays, the frame being scrubbed, layer/opacity,
 * camera move under edit, per-frame render flags, and inline errors. */

import type { Layer, MoveSpec, Point, RenderJobInfo, SessionInfo } from "./types.js";

export interface Overlay {
  sphereId: number;
  cssColor: string;
  points: Point[];
}

export interface CameraIssue {
  message: string;
  frame?: number;
}

export function cssColor(rgb: [number, number, number]): string {
  return `rgb(${rgb[0]}, ${rgb[1]}, ${rgb[2]})`;
}

export class SessionView {
  info: SessionInfo | null = null;
  overlays: Overlay[] = [];
  frameIndex = 1;
  layer: Layer = "composite";
  opacity = 60;
  depthHint = 5.0;
  useDepthHint = true;
  move: MoveSpec = { kind: "static", magnitude: 0 };
  composeMove: MoveSpec | null = null;
  cameraIssue: CameraIssue | null = null;
  frameReady: boolean[] = [];

  get active(): boolean {
    return this.info !== null;
  }

  get frameCount(): number {
    return this.info?.frames ?? 0;
  }

  beginSession(info: SessionInfo): void {
    this.info = info;
    this.overlays = [];
    this.frameIndex = 1;
    this.cameraIssue = null;
    this.frameReady = new Array(info.frames).fill(false);
  }

  endSession(): void {
    this.info = null;
    this.overlays = [];
    this.frameReady = [];
    this.cameraIssue = null;
  }

  clampFrame(index: number): number {
    if (this.frameCount < 1) return 1;
    return Math.min(Math.max(Math.round(index), 1), this.frameCount);
  }

  setFrame(index: number): void {
    this.frameIndex = this.clampFrame(index);
  }

  addOverlay(sphereId: number, color: [number, number, number], points: Point[]): void {
    this.overlays.push({ sphereId, cssColor: cssColor(color), points });
  }

  removeOverlay(sphereId: number): void {
    this.overlays = this.overlays.filter((o) => o.sphereId !== sphereId);
  }

  /** Edits invalidate every per-frame ready flag (new version renders). */
  noteEdited(): void {
    this.frameReady = new Array(this.frameCount).fill(false);
    this.cameraIssue = null;
  }

  noteCameraIssue(message: string, frame?: number): void {
    this.cameraIssue = { message, frame };
  }

  applyJob(job: RenderJobInfo): void {
    for (const [index, done] of Object.entries(job.frames)) {
      const i = Number(index) - 1;
      if (i >= 0 && i < this.frameReady.length && done) this.frameReady[i] = true;
    }
  }

  markFrameReady(index: number): void {
    const i = index - 1;
    if (i >= 0 && i < this.frameReady.length) this.frameReady[i] = true;
  }
}
