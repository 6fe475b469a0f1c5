"""HTTP rendering service backing the authoring UI.

Sessions are in-memory. Edits to one session are serialized under its
lock and bump a monotonically increasing version; renders always read an
immutable scene snapshot taken at one version, so a served frame never
mixes versions. Rendered PNGs are cached per (version, frame, layer,
opacity) and invalidated simply by the version moving on.
"""

from __future__ import annotations

import io
import threading
import uuid
from dataclasses import dataclass, field

import numpy as np
from fastapi import FastAPI, File, Form, Request, Response, UploadFile
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from PIL import Image, UnidentifiedImageError

from . import camera_paths
from .errors import (
    CameraEscapedEnvelopeError,
    InvalidArgumentError,
    MissingDepthError,
    MotionCuesError,
    OutOfFrameError,
)
from .formats.images import blend_over, png_bytes
from .formats.poses import _pose_from_values
from .formats.scenedoc import serialize_scene
from .manipulation import UserTrajectory, add_sphere, lift_trajectory, remove_sphere
from .render import render_envelope_layer, render_sphere_layer
from .scene import (
    CameraFrame,
    CameraTrajectory,
    MotionScene,
    build_scene,
    default_intrinsics,
)

DEFAULT_FRAME_COUNT = 16
LAYERS = ("spheres", "envelope", "composite")


@dataclass
class RenderJob:
    job_id: str
    scene_version: int
    start: int
    end: int
    status: str = "pending"  # pending -> running -> done | failed
    done_frames: dict[int, bool] = field(default_factory=dict)
    error: str | None = None

    def as_dict(self) -> dict:
        return {
            "job_id": self.job_id,
            "scene_version": self.scene_version,
            "start": self.start,
            "end": self.end,
            "status": self.status,
            "frames": {str(k): v for k, v in sorted(self.done_frames.items())},
            "error": self.error,
        }


@dataclass
class Session:
    session_id: str
    scene: MotionScene
    reference: np.ndarray
    depth_map: np.ndarray | None
    version: int = 0
    lock: threading.Lock = field(default_factory=threading.Lock)
    frame_cache: dict[tuple, bytes] = field(default_factory=dict)
    jobs: dict[str, RenderJob] = field(default_factory=dict)

    def bump(self, scene: MotionScene) -> None:
        """Replace the scene under the caller-held lock. Old-version cache
        entries are dropped; renders running against the previous snapshot
        stay consistent because scenes are immutable values."""
        self.scene = scene
        self.version += 1
        self.frame_cache = {k: v for k, v in self.frame_cache.items() if k[0] == self.version}


def _error_response(exc: MotionCuesError, status: int) -> JSONResponse:
    payload = {"error": exc.code, "message": str(exc)}
    frame_index = getattr(exc, "frame_index", None)
    if frame_index is not None:
        payload["frame"] = frame_index
    return JSONResponse(payload, status_code=status)


def _not_found(what: str) -> JSONResponse:
    return JSONResponse({"error": "not-found", "message": what}, status_code=404)


def create_app() -> FastAPI:
    app = FastAPI(title="motioncues render service")
    sessions: dict[str, Session] = {}
    registry_lock = threading.Lock()

    @app.exception_handler(MotionCuesError)
    async def _handle_domain_error(request, exc: MotionCuesError):
        if isinstance(exc, CameraEscapedEnvelopeError):
            return _error_response(exc, 422)
        if isinstance(exc, (InvalidArgumentError, MissingDepthError, OutOfFrameError)):
            return _error_response(exc, 422)
        return _error_response(exc, 400)

    def _get_session(session_id: str) -> Session | None:
        with registry_lock:
            return sessions.get(session_id)

    def _session_info(s: Session) -> dict:
        return {
            "session_id": s.session_id,
            "width": s.scene.width,
            "height": s.scene.height,
            "frames": s.scene.frame_count,
            "version": s.version,
            "has_depth_map": s.depth_map is not None,
            "spheres": [
                {"sphere_id": sp.id, "color": list(sp.color)} for sp in s.scene.spheres
            ],
        }

    @app.post("/sessions")
    async def create_session(
        reference: UploadFile = File(...),
        depth: UploadFile | None = File(None),
        frames: int = Form(DEFAULT_FRAME_COUNT),
    ):
        if frames < 1:
            raise InvalidArgumentError(f"frames must be >= 1, got {frames}")
        try:
            ref_img = np.asarray(Image.open(io.BytesIO(await reference.read())).convert("RGB"))
        except (UnidentifiedImageError, OSError) as exc:
            raise InvalidArgumentError(f"reference is not a readable image: {exc}") from exc
        height, width = ref_img.shape[:2]
        if width < 2 or height < 2:
            raise InvalidArgumentError(f"reference image too small: {width}x{height}")
        depth_map = None
        if depth is not None:
            raw = await depth.read()
            if raw:
                try:
                    with Image.open(io.BytesIO(raw)) as img:
                        if img.mode not in ("I", "I;16", "L", "F"):
                            img = img.convert("I")
                        depth_map = np.asarray(img, dtype=np.float64)
                except (UnidentifiedImageError, OSError) as exc:
                    raise InvalidArgumentError(
                        f"depth map is not a readable image: {exc}"
                    ) from exc
                if depth_map.shape != (height, width):
                    raise InvalidArgumentError(
                        f"depth map {depth_map.shape} does not match reference "
                        f"{height, width}"
                    )
        scene = build_scene(
            width,
            height,
            CameraTrajectory.static(default_intrinsics(width, height), frames),
            np.empty((frames, 0, 3)),
        )
        session = Session(
            session_id=uuid.uuid4().hex[:12],
            scene=scene,
            reference=ref_img,
            depth_map=depth_map,
        )
        with registry_lock:
            sessions[session.session_id] = session
        return _session_info(session)

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        s = _get_session(session_id)
        if s is None:
            return _not_found(f"no session {session_id}")
        with s.lock:
            return _session_info(s)

    @app.delete("/sessions/{session_id}")
    def delete_session(session_id: str):
        with registry_lock:
            if sessions.pop(session_id, None) is None:
                return _not_found(f"no session {session_id}")
        return {"deleted": session_id}

    @app.get("/sessions/{session_id}/camera")
    def get_camera(session_id: str):
        s = _get_session(session_id)
        if s is None:
            return _not_found(f"no session {session_id}")
        with s.lock:
            frames = [
                {
                    "fx": f.intrinsics.fx,
                    "fy": f.intrinsics.fy,
                    "cx": f.intrinsics.cx,
                    "cy": f.intrinsics.cy,
                    "rotation": f.pose.rotation.tolist(),
                    "translation": f.pose.translation.tolist(),
                }
                for f in s.scene.trajectory.frames
            ]
            return {"version": s.version, "frames": frames}

    def _trajectory_from_body(body: dict, s: Session) -> CameraTrajectory:
        base = default_intrinsics(s.scene.width, s.scene.height)
        frame_count = s.scene.frame_count
        if "preset" in body and body["preset"] is not None:
            spec = _move_spec(body["preset"], frame_count)
            traj = camera_paths.generate(spec, base)
            for extra in body.get("compose", []) or []:
                traj = camera_paths.compose(
                    traj, camera_paths.generate(_move_spec(extra, frame_count), base)
                )
            return traj
        if "poses" in body and body["poses"] is not None:
            rows = body["poses"]
            if len(rows) != frame_count:
                raise InvalidArgumentError(
                    f"pose list has {len(rows)} entries, session has {frame_count} frames"
                )
            poses = [
                _pose_from_values([float(v) for v in row], i + 1, "<request>")
                for i, row in enumerate(rows)
            ]
            return CameraTrajectory(tuple(CameraFrame(base, p) for p in poses))
        raise InvalidArgumentError("camera body needs either 'preset' or 'poses'")

    def _move_spec(doc: dict, frame_count: int) -> camera_paths.CameraMoveSpec:
        if not isinstance(doc, dict) or "kind" not in doc:
            raise InvalidArgumentError("camera preset needs a 'kind'")
        return camera_paths.CameraMoveSpec(
            kind=doc["kind"],
            magnitude=float(doc.get("magnitude", 0.0)),
            frames=frame_count,
            pivot_distance=float(
                doc.get("pivot_distance", camera_paths.DEFAULT_PIVOT_DISTANCE)
            ),
        )

    @app.put("/sessions/{session_id}/camera")
    def put_camera(session_id: str, body: dict):
        s = _get_session(session_id)
        if s is None:
            return _not_found(f"no session {session_id}")
        with s.lock:
            trajectory = _trajectory_from_body(body, s)
            # reject trajectories that would fail at render time, naming the frame
            for l, f in enumerate(trajectory.frames, start=1):
                center = f.pose.camera_center()
                if np.max(np.abs(center)) >= s.scene.envelope.side_length / 2:
                    raise CameraEscapedEnvelopeError(
                        f"camera leaves the envelope at frame {l}", frame_index=l
                    )
            s.bump(s.scene.with_trajectory(trajectory))
            return {"version": s.version, "frames": s.scene.frame_count}

    @app.post("/sessions/{session_id}/spheres")
    def post_sphere(session_id: str, body: dict):
        s = _get_session(session_id)
        if s is None:
            return _not_found(f"no session {session_id}")
        with s.lock:
            traj = UserTrajectory(
                np.asarray(body.get("points"), dtype=float),
                depth_hint=body.get("depth_hint"),
            )
            track = lift_trajectory(traj, s.depth_map, s.scene)
            scene, sphere_id = add_sphere(s.scene, track)
            s.bump(scene)
            return {
                "version": s.version,
                "sphere_id": sphere_id,
                "color": list(scene.spheres.by_id(sphere_id).color),
            }

    @app.put("/sessions/{session_id}/spheres/{sphere_id}")
    def put_sphere(session_id: str, sphere_id: int, body: dict):
        s = _get_session(session_id)
        if s is None:
            return _not_found(f"no session {session_id}")
        with s.lock:
            if all(sp.id != sphere_id for sp in s.scene.spheres):
                return _not_found(f"no sphere {sphere_id}")
            traj = UserTrajectory(
                np.asarray(body.get("points"), dtype=float),
                depth_hint=body.get("depth_hint"),
            )
            track = lift_trajectory(traj, s.depth_map, s.scene)
            scene, _ = add_sphere(remove_sphere(s.scene, sphere_id), track, sphere_id=sphere_id)
            s.bump(scene)
            return {
                "version": s.version,
                "sphere_id": sphere_id,
                "color": list(scene.spheres.by_id(sphere_id).color),
            }

    @app.delete("/sessions/{session_id}/spheres/{sphere_id}")
    def delete_sphere(session_id: str, sphere_id: int):
        s = _get_session(session_id)
        if s is None:
            return _not_found(f"no session {session_id}")
        with s.lock:
            if all(sp.id != sphere_id for sp in s.scene.spheres):
                return _not_found(f"no sphere {sphere_id}")
            s.bump(remove_sphere(s.scene, sphere_id))
            return {"version": s.version, "deleted": sphere_id}

    def _render_layer_png(
        s: Session, version: int, scene: MotionScene, frame: int, layer: str, opacity: int
    ) -> bytes:
        key = (version, frame, layer, opacity)
        cached = s.frame_cache.get(key)
        if cached is not None:
            return cached
        if layer == "spheres":
            img = render_sphere_layer(scene, frame)
        elif layer == "envelope":
            img = render_envelope_layer(scene, frame)
        else:
            composite = blend_over(
                s.reference, render_envelope_layer(scene, frame), opacity
            )
            composite = blend_over(
                composite, render_sphere_layer(scene, frame), opacity, skip_black=True
            )
            img = composite
        data = png_bytes(img)
        with s.lock:
            if s.version == version:
                s.frame_cache[key] = data
        return data

    @app.post("/sessions/{session_id}/render")
    def post_render(session_id: str, body: dict | None = None):
        s = _get_session(session_id)
        if s is None:
            return _not_found(f"no session {session_id}")
        body = body or {}
        with s.lock:
            scene, version = s.scene, s.version
            start = int(body.get("start", 1))
            end = int(body.get("end", scene.frame_count))
            if not (1 <= start <= end <= scene.frame_count):
                raise InvalidArgumentError(
                    f"frame range [{start}, {end}] outside [1, {scene.frame_count}]"
                )
            job = RenderJob(
                job_id=uuid.uuid4().hex[:12],
                scene_version=version,
                start=start,
                end=end,
                done_frames={i: False for i in range(start, end + 1)},
            )
            s.jobs[job.job_id] = job

        def run():
            job.status = "running"
            try:
                for idx in range(job.start, job.end + 1):
                    _render_layer_png(s, version, scene, idx, "spheres", 100)
                    _render_layer_png(s, version, scene, idx, "envelope", 100)
                    job.done_frames[idx] = True
                job.status = "done"
            except MotionCuesError as exc:
                job.status = "failed"
                job.error = f"{exc.code}: {exc}"

        threading.Thread(target=run, daemon=True).start()
        return job.as_dict()

    @app.get("/sessions/{session_id}/render/{job_id}")
    def get_render_job(session_id: str, job_id: str):
        s = _get_session(session_id)
        if s is None:
            return _not_found(f"no session {session_id}")
        job = s.jobs.get(job_id)
        if job is None:
            return _not_found(f"no render job {job_id}")
        return job.as_dict()

    @app.get("/sessions/{session_id}/frames/{frame_index}")
    def get_frame(
        session_id: str,
        frame_index: int,
        request: Request,
        layer: str = "composite",
        opacity: int = 60,
    ):
        s = _get_session(session_id)
        if s is None:
            return _not_found(f"no session {session_id}")
        if layer not in LAYERS:
            raise InvalidArgumentError(f"layer must be one of {LAYERS}, got {layer!r}")
        if not 0 <= opacity <= 100:
            raise InvalidArgumentError(f"opacity must be 0..100, got {opacity}")
        with s.lock:
            scene, version = s.scene, s.version
        if not 1 <= frame_index <= scene.frame_count:
            raise InvalidArgumentError(
                f"frame {frame_index} outside [1, {scene.frame_count}]"
            )
        etag = f'"{version}-{frame_index}-{layer}-{opacity}"'
        if request.headers.get("if-none-match") == etag:
            return Response(status_code=304, headers={"ETag": etag})
        data = _render_layer_png(s, version, scene, frame_index, layer, opacity)
        return Response(
            content=data,
            media_type="image/png",
            headers={
                "ETag": etag,
                "X-Scene-Version": str(version),
                "Cache-Control": "private, max-age=0, must-revalidate",
            },
        )

    @app.get("/sessions/{session_id}/scene")
    def export_scene(session_id: str):
        s = _get_session(session_id)
        if s is None:
            return _not_found(f"no session {session_id}")
        with s.lock:
            doc = serialize_scene(s.scene)
            version = s.version
        return Response(
            content=doc,
            media_type="application/json",
            headers={
                "X-Scene-Version": str(version),
                "Content-Disposition": 'attachment; filename="scene.json"',
            },
        )

    return app


def serve(host: str = "127.0.0.1", port: int = 8722, *, frontend_dir: str | None = None) -> None:
    """Run the service with uvicorn; used by the CLI 'serve' subcommand."""
    import uvicorn

    app = create_app()
    if frontend_dir:
        app.mount("/", StaticFiles(directory=frontend_dir, html=True), name="ui")
    uvicorn.run(app, host=host, port=port, log_level="warning")
