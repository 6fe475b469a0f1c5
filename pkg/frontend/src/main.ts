/** DOM wiring for the authoring tool. Every displayed control-signal
 * pixel comes from the rendering service; the client only collects
 * pointer paths, picks camera presets, scrubs previews, and exports. */

import { ApiClient, ApiError } from "./api.js";
import { clampToBounds, simplifyPath } from "./path.js";
import { SessionView } from "./state.js";
import { drawStrokes, overlayStrokes } from "./overlay.js";
import { MOVE_KINDS, type Layer, type MoveKind, type Point } from "./types.js";

const client = new ApiClient("");
const view = new SessionView();

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

const referenceInput = el<HTMLInputElement>("reference-input");
const depthInput = el<HTMLInputElement>("depth-input");
const framesInput = el<HTMLInputElement>("frames-input");
const createButton = el<HTMLButtonElement>("create-session");
const statusLine = el<HTMLElement>("status-line");

const stage = el<HTMLDivElement>("stage");
const previewImg = el<HTMLImageElement>("preview");
const overlayCanvas = el<HTMLCanvasElement>("overlay");

const depthSlider = el<HTMLInputElement>("depth-slider");
const depthValue = el<HTMLElement>("depth-value");
const useDepthToggle = el<HTMLInputElement>("use-depth-hint");

const moveKindSelect = el<HTMLSelectElement>("move-kind");
const moveMagnitude = el<HTMLInputElement>("move-magnitude");
const composeKindSelect = el<HTMLSelectElement>("compose-kind");
const composeMagnitude = el<HTMLInputElement>("compose-magnitude");
const applyCameraButton = el<HTMLButtonElement>("apply-camera");
const cameraErrorLine = el<HTMLElement>("camera-error");

const frameSlider = el<HTMLInputElement>("frame-slider");
const frameLabel = el<HTMLElement>("frame-label");
const layerSelect = el<HTMLSelectElement>("layer-select");
const opacitySlider = el<HTMLInputElement>("opacity-slider");
const opacityValue = el<HTMLElement>("opacity-value");
const timeline = el<HTMLDivElement>("timeline");
const renderAllButton = el<HTMLButtonElement>("render-all");
const exportButton = el<HTMLButtonElement>("export-scene");

let drawing: Point[] | null = null;
let previewUrl: string | null = null;

function setStatus(text: string, isError = false): void {
  statusLine.textContent = text;
  statusLine.classList.toggle("error", isError);
}

function setControlsEnabled(enabled: boolean): void {
  for (const node of [
    depthSlider, useDepthToggle, moveKindSelect, moveMagnitude, composeKindSelect,
    composeMagnitude, applyCameraButton, frameSlider, layerSelect, opacitySlider,
    renderAllButton, exportButton,
  ]) {
    (node as HTMLInputElement).disabled = !enabled;
  }
  stage.classList.toggle("inactive", !enabled);
}

function redrawOverlay(): void {
  const ctx = overlayCanvas.getContext("2d");
  if (!ctx) return;
  const strokes = overlayStrokes(view.overlays, drawing ? { points: drawing } : null);
  drawStrokes(ctx, overlayCanvas.width, overlayCanvas.height, strokes);
}

function renderTimeline(): void {
  timeline.replaceChildren();
  for (let i = 1; i <= view.frameCount; i++) {
    const cell = document.createElement("button");
    cell.className = "timeline-cell";
    cell.textContent = String(i);
    if (view.frameReady[i - 1]) cell.classList.add("ready");
    if (i === view.frameIndex) cell.classList.add("current");
    if (view.cameraIssue?.frame === i) cell.classList.add("failed");
    cell.addEventListener("click", () => {
      view.setFrame(i);
      void refreshPreview();
    });
    timeline.append(cell);
  }
}

async function refreshPreview(): Promise<void> {
  if (!view.info) return;
  frameSlider.value = String(view.frameIndex);
  frameLabel.textContent = `${view.frameIndex} / ${view.frameCount}`;
  renderTimeline();
  try {
    const blob = await client.fetchFrame(
      view.info.session_id,
      view.frameIndex,
      view.layer,
      view.opacity,
    );
    if (previewUrl) URL.revokeObjectURL(previewUrl);
    previewUrl = URL.createObjectURL(blob);
    previewImg.src = previewUrl;
    view.markFrameReady(view.frameIndex);
    renderTimeline();
  } catch (err) {
    handleError(err);
  }
}

function handleError(err: unknown): void {
  if (err instanceof ApiError) {
    if (err.code === "camera-escaped-envelope") {
      view.noteCameraIssue(err.message, err.frame);
      cameraErrorLine.textContent =
        err.frame !== undefined ? `${err.message} (frame ${err.frame})` : err.message;
      renderTimeline();
      return;
    }
    setStatus(`${err.code}: ${err.message}`, true);
    return;
  }
  setStatus(String(err), true);
}

createButton.addEventListener("click", async () => {
  const file = referenceInput.files?.[0];
  if (!file) {
    setStatus("choose a reference image first", true);
    return;
  }
  try {
    const frames = Number(framesInput.value) || 16;
    const info = await client.createSession(file, frames, depthInput.files?.[0]);
    view.beginSession(info);
    overlayCanvas.width = info.width;
    overlayCanvas.height = info.height;
    previewImg.width = info.width;
    previewImg.height = info.height;
    frameSlider.min = "1";
    frameSlider.max = String(info.frames);
    frameSlider.value = "1";
    setControlsEnabled(true);
    setStatus(
      `session ${info.session_id}: ${info.width}x${info.height}, ${info.frames} frames`,
    );
    redrawOverlay();
    await refreshPreview();
  } catch (err) {
    handleError(err);
  }
});

function canvasPoint(event: PointerEvent): Point {
  const rect = overlayCanvas.getBoundingClientRect();
  return {
    x: ((event.clientX - rect.left) / rect.width) * overlayCanvas.width,
    y: ((event.clientY - rect.top) / rect.height) * overlayCanvas.height,
  };
}

overlayCanvas.addEventListener("pointerdown", (event) => {
  if (!view.active) return; // drawing is disabled without a session
  overlayCanvas.setPointerCapture(event.pointerId);
  drawing = [canvasPoint(event)];
  redrawOverlay();
});

overlayCanvas.addEventListener("pointermove", (event) => {
  if (!drawing) return;
  drawing.push(canvasPoint(event));
  redrawOverlay();
});

overlayCanvas.addEventListener("pointerup", async () => {
  if (!drawing || !view.info) return;
  // clamp off-image samples into bounds before submitting
  const path = simplifyPath(clampToBounds(drawing, view.info.width, view.info.height));
  drawing = null;
  try {
    const reply = await client.addSphere(
      view.info.session_id,
      path,
      view.useDepthHint ? view.depthHint : undefined,
    );
    view.addOverlay(reply.sphere_id, reply.color, path);
    view.noteEdited();
    redrawOverlay();
    setStatus(`sphere ${reply.sphere_id} added (version ${reply.version})`);
    await refreshPreview();
  } catch (err) {
    redrawOverlay();
    handleError(err);
  }
});

depthSlider.addEventListener("input", () => {
  view.depthHint = Number(depthSlider.value);
  depthValue.textContent = depthSlider.value;
});

useDepthToggle.addEventListener("change", () => {
  view.useDepthHint = useDepthToggle.checked;
});

for (const select of [moveKindSelect, composeKindSelect]) {
  for (const kind of MOVE_KINDS) {
    const option = document.createElement("option");
    option.value = kind;
    option.textContent = kind.replace("_", " ");
    select.append(option);
  }
}
composeKindSelect.insertBefore(new Option("(none)", ""), composeKindSelect.firstChild);
composeKindSelect.value = "";

applyCameraButton.addEventListener("click", async () => {
  if (!view.info) return;
  cameraErrorLine.textContent = "";
  const body: Parameters<ApiClient["putCamera"]>[1] = {
    preset: {
      kind: moveKindSelect.value as MoveKind,
      magnitude: Number(moveMagnitude.value) || 0,
    },
  };
  if (composeKindSelect.value) {
    body.compose = [
      {
        kind: composeKindSelect.value as MoveKind,
        magnitude: Number(composeMagnitude.value) || 0,
      },
    ];
  }
  try {
    const reply = await client.putCamera(view.info.session_id, body);
    view.noteEdited();
    setStatus(`camera updated (version ${reply.version})`);
    await refreshPreview();
  } catch (err) {
    handleError(err);
  }
});

frameSlider.addEventListener("input", () => {
  view.setFrame(Number(frameSlider.value));
  void refreshPreview();
});

layerSelect.addEventListener("change", () => {
  view.layer = layerSelect.value as Layer;
  void refreshPreview();
});

opacitySlider.addEventListener("input", () => {
  view.opacity = Number(opacitySlider.value);
  opacityValue.textContent = opacitySlider.value;
  void refreshPreview();
});

renderAllButton.addEventListener("click", async () => {
  if (!view.info) return;
  try {
    let job = await client.startRender(view.info.session_id, 1, view.frameCount);
    while (job.status === "pending" || job.status === "running") {
      await new Promise((resolve) => setTimeout(resolve, 150));
      job = await client.getRenderJob(view.info.session_id, job.job_id);
      view.applyJob(job);
      renderTimeline();
    }
    if (job.status === "failed") setStatus(job.error ?? "render failed", true);
    else setStatus("all frames rendered");
  } catch (err) {
    handleError(err);
  }
});

exportButton.addEventListener("click", async () => {
  if (!view.info) return;
  try {
    const doc = await client.exportScene(view.info.session_id);
    const blob = new Blob([doc], { type: "application/json" });
    const url = URL.createObjectURL(blob);
    const a = document.createElement("a");
    a.href = url;
    a.download = "scene.json";
    a.click();
    URL.revokeObjectURL(url);
    setStatus("scene document exported");
  } catch (err) {
    handleError(err);
  }
});

setControlsEnabled(false);
setStatus("load a reference image to start");
