/** Typed client for the rendering service.
 *
 * Frame images are cached in memory keyed by (scene version, frame,
 * layer, opacity): scrubbing a frame the client has already seen at the
 * current version issues no network request, and any edit bumps the
 * version so the next fetch always reflects the new server state.
 */

import type { Layer, MoveSpec, Point, RenderJobInfo, SessionInfo, SphereInfo } from "./types.js";

export class ApiError extends Error {
  constructor(
    message: string,
    public readonly status: number,
    public readonly code: string,
    public readonly frame?: number,
  ) {
    super(message);
  }
}

export interface CameraRequest {
  preset?: MoveSpec & { pivot_distance?: number };
  compose?: (MoveSpec & { pivot_distance?: number })[];
  poses?: number[][];
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

async function raiseForStatus(resp: Response): Promise<void> {
  if (resp.ok) return;
  let code = `http-${resp.status}`;
  let message = resp.statusText;
  let frame: number | undefined;
  try {
    const body = await resp.json();
    if (body && typeof body === "object") {
      code = body.error ?? code;
      message = body.message ?? message;
      frame = typeof body.frame === "number" ? body.frame : undefined;
    }
  } catch {
    // non-JSON error body: keep the HTTP status text
  }
  throw new ApiError(message, resp.status, code, frame);
}

export class ApiClient {
  /** Last scene version reported by the server; cache keys include it. */
  private version = 0;
  private frameCache = new Map<string, Blob>();
  fetchCount = 0;

  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (input, init) => globalThis.fetch(input, init),
  ) {}

  get knownVersion(): number {
    return this.version;
  }

  private noteVersion(version: number): void {
    if (version > this.version) {
      this.version = version;
      for (const key of [...this.frameCache.keys()]) {
        if (!key.startsWith(`${version}:`)) this.frameCache.delete(key);
      }
    }
  }

  private async request(path: string, init?: RequestInit): Promise<Response> {
    this.fetchCount += 1;
    const resp = await this.fetchFn(this.baseUrl + path, init);
    await raiseForStatus(resp);
    return resp;
  }

  private async requestJson<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await this.request(path, init);
    const body = (await resp.json()) as T;
    const version = (body as { version?: unknown }).version;
    if (typeof version === "number") this.noteVersion(version);
    return body;
  }

  async createSession(reference: Blob, frames: number, depth?: Blob): Promise<SessionInfo> {
    const form = new FormData();
    form.append("reference", reference, "reference.png");
    form.append("frames", String(frames));
    if (depth) form.append("depth", depth, "depth.png");
    const info = await this.requestJson<SessionInfo>("/sessions", {
      method: "POST",
      body: form,
    });
    this.version = info.version;
    this.frameCache.clear();
    return info;
  }

  getSession(sessionId: string): Promise<SessionInfo> {
    return this.requestJson(`/sessions/${sessionId}`);
  }

  async deleteSession(sessionId: string): Promise<void> {
    await this.request(`/sessions/${sessionId}`, { method: "DELETE" });
  }

  putCamera(sessionId: string, body: CameraRequest): Promise<{ version: number }> {
    return this.requestJson(`/sessions/${sessionId}/camera`, {
      method: "PUT",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  addSphere(
    sessionId: string,
    points: Point[],
    depthHint?: number,
  ): Promise<{ sphere_id: number; color: SphereInfo["color"]; version: number }> {
    return this.requestJson(`/sessions/${sessionId}/spheres`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({
        points: points.map((p) => [p.x, p.y]),
        depth_hint: depthHint ?? null,
      }),
    });
  }

  deleteSphere(sessionId: string, sphereId: number): Promise<{ version: number }> {
    return this.requestJson(`/sessions/${sessionId}/spheres/${sphereId}`, {
      method: "DELETE",
    });
  }

  startRender(sessionId: string, start: number, end: number): Promise<RenderJobInfo> {
    return this.requestJson(`/sessions/${sessionId}/render`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ start, end }),
    });
  }

  getRenderJob(sessionId: string, jobId: string): Promise<RenderJobInfo> {
    return this.requestJson(`/sessions/${sessionId}/render/${jobId}`);
  }

  /** Fetch one preview frame as a PNG blob, serving repeats of the current
   * scene version from memory. */
  async fetchFrame(
    sessionId: string,
    frameIndex: number,
    layer: Layer,
    opacity: number,
  ): Promise<Blob> {
    const key = `${this.version}:${frameIndex}:${layer}:${opacity}`;
    const cached = this.frameCache.get(key);
    if (cached) return cached;
    const resp = await this.request(
      `/sessions/${sessionId}/frames/${frameIndex}?layer=${layer}&opacity=${opacity}`,
    );
    const served = Number(resp.headers.get("x-scene-version") ?? this.version);
    const blob = await resp.blob();
    this.noteVersion(served);
    this.frameCache.set(`${served}:${frameIndex}:${layer}:${opacity}`, blob);
    return blob;
  }

  async exportScene(sessionId: string): Promise<string> {
    const resp = await this.request(`/sessions/${sessionId}/scene`);
    return resp.text();
  }
}
