import { describe, expect, it } from "vitest";

import { SessionView, cssColor } from "../src/state.js";
import { drawStrokes, overlayStrokes } from "../src/overlay.js";
import type { RenderJobInfo, SessionInfo } from "../src/types.js";

const INFO: SessionInfo = {
  session_id: "abc",
  width: 96,
  height: 64,
  frames: 8,
  version: 0,
  has_depth_map: false,
  spheres: [],
};

describe("SessionView", () => {
  it("is inactive until a session begins", () => {
    const view = new SessionView();
    expect(view.active).toBe(false);
    view.beginSession(INFO);
    expect(view.active).toBe(true);
    expect(view.frameReady).toHaveLength(8);
  });

  it("clamps scrubbing beyond the frame range", () => {
    const view = new SessionView();
    view.beginSession(INFO);
    view.setFrame(99);
    expect(view.frameIndex).toBe(8);
    view.setFrame(-2);
    expect(view.frameIndex).toBe(1);
    view.setFrame(3.4);
    expect(view.frameIndex).toBe(3);
  });

  it("tracks overlays with server-assigned colors", () => {
    const view = new SessionView();
    view.beginSession(INFO);
    view.addOverlay(0, [255, 0, 128], [{ x: 1, y: 1 }]);
    expect(view.overlays[0].cssColor).toBe("rgb(255, 0, 128)");
    view.removeOverlay(0);
    expect(view.overlays).toHaveLength(0);
  });

  it("edits clear render flags and camera issues", () => {
    const view = new SessionView();
    view.beginSession(INFO);
    view.markFrameReady(2);
    view.noteCameraIssue("escape", 5);
    expect(view.frameReady[1]).toBe(true);
    view.noteEdited();
    expect(view.frameReady.every((f) => !f)).toBe(true);
    expect(view.cameraIssue).toBeNull();
  });

  it("applies render-job frame flags", () => {
    const view = new SessionView();
    view.beginSession(INFO);
    const job: RenderJobInfo = {
      job_id: "j",
      scene_version: 0,
      start: 1,
      end: 3,
      status: "done",
      frames: { "1": true, "2": true, "3": false },
      error: null,
    };
    view.applyJob(job);
    expect(view.frameReady.slice(0, 4)).toEqual([true, true, false, false]);
  });
});

describe("overlay strokes", () => {
  it("includes the in-progress stroke after the committed ones", () => {
    const view = new SessionView();
    view.beginSession(INFO);
    view.addOverlay(1, [0, 128, 128], [{ x: 0, y: 0 }, { x: 5, y: 5 }]);
    const strokes = overlayStrokes(view.overlays, { points: [{ x: 9, y: 9 }] });
    expect(strokes).toHaveLength(2);
    expect(strokes[0].color).toBe(cssColor([0, 128, 128]));
  });

  it("drawStrokes issues one polyline and one start marker per stroke", () => {
    const ops: string[] = [];
    const ctx = {
      strokeStyle: "",
      fillStyle: "",
      lineWidth: 0,
      clearRect: () => ops.push("clear"),
      beginPath: () => ops.push("begin"),
      moveTo: () => ops.push("move"),
      lineTo: () => ops.push("line"),
      arc: () => ops.push("arc"),
      stroke: () => ops.push("stroke"),
      fill: () => ops.push("fill"),
    };
    drawStrokes(ctx, 10, 10, [
      { color: "red", width: 2, points: [{ x: 0, y: 0 }, { x: 1, y: 1 }], endpointRadius: 3 },
    ]);
    expect(ops).toEqual([
      "clear", "begin", "move", "line", "stroke", "begin", "arc", "fill",
    ]);
  });
});
