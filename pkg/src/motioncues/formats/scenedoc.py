"""The scene document: a human-readable JSON file carrying one complete
MotionScene. Floats are serialized with shortest-repr precision, which
round-trips bit-exactly, so parse(serialize(scene)) == scene and renders
of the two are byte-identical."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from ..errors import (
    FormatError,
    InvalidArgumentError,
    SemanticError,
    UnsupportedVersionError,
)
from ..scene import (
    CameraFrame,
    CameraIntrinsics,
    CameraPose,
    CameraTrajectory,
    MotionScene,
    RenderParams,
    Sphere,
    SphereSet,
    WorldEnvelope,
)

SCENE_DOC_VERSION = "1"
_KNOWN_VERSIONS = {"1"}


def scene_to_dict(scene: MotionScene) -> dict:
    return {
        "version": SCENE_DOC_VERSION,
        "width": scene.width,
        "height": scene.height,
        "trajectory": [
            {
                "fx": f.intrinsics.fx,
                "fy": f.intrinsics.fy,
                "cx": f.intrinsics.cx,
                "cy": f.intrinsics.cy,
                "rotation": f.pose.rotation.tolist(),
                "translation": f.pose.translation.tolist(),
            }
            for f in scene.trajectory.frames
        ],
        "spheres": [
            {
                "id": s.id,
                "color": list(s.color),
                "track": s.track.tolist(),
                "normalized_depths": s.normalized_depths.tolist(),
            }
            for s in scene.spheres
        ],
        "envelope": {
            "side_length": scene.envelope.side_length,
            "checker_cell": scene.envelope.checker_cell,
            "color_a": list(scene.envelope.color_a),
            "color_b": list(scene.envelope.color_b),
            "face_tints": [list(t) for t in scene.envelope.face_tints],
        },
        "render_params": {
            "r_min": scene.render_params.r_min,
            "r_max": scene.render_params.r_max,
        },
        "depth_range": list(scene.depth_range) if scene.depth_range is not None else None,
    }


def serialize_scene(scene: MotionScene) -> str:
    return json.dumps(scene_to_dict(scene), indent=2, allow_nan=False) + "\n"


def _get(d: dict, key: str, field: str):
    if not isinstance(d, dict) or key not in d:
        raise SemanticError(f"missing required key {key!r}", field=field)
    return d[key]


def scene_from_dict(doc: dict) -> MotionScene:
    if not isinstance(doc, dict):
        raise SemanticError("scene document must be a JSON object", field="<root>")
    version = _get(doc, "version", "version")
    if version not in _KNOWN_VERSIONS:
        raise UnsupportedVersionError(
            f"unsupported scene document version {version!r}; this build reads {sorted(_KNOWN_VERSIONS)}"
        )

    def build(field: str, fn, *args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except InvalidArgumentError as exc:
            raise SemanticError(str(exc), field=field) from exc
        except (TypeError, ValueError) as exc:
            raise SemanticError(f"malformed value: {exc}", field=field) from exc

    frames = []
    traj_doc = _get(doc, "trajectory", "trajectory")
    if not isinstance(traj_doc, list):
        raise SemanticError("trajectory must be a list of frames", field="trajectory")
    for i, fd in enumerate(traj_doc):
        field = f"trajectory[{i}]"
        intr = build(
            field,
            CameraIntrinsics,
            _get(fd, "fx", field),
            _get(fd, "fy", field),
            _get(fd, "cx", field),
            _get(fd, "cy", field),
        )
        pose = build(
            field,
            CameraPose,
            np.array(_get(fd, "rotation", field), dtype=float),
            np.array(_get(fd, "translation", field), dtype=float),
        )
        frames.append(CameraFrame(intr, pose))
    trajectory = build("trajectory", CameraTrajectory, tuple(frames))

    spheres_doc = _get(doc, "spheres", "spheres")
    if not isinstance(spheres_doc, list):
        raise SemanticError("spheres must be a list", field="spheres")
    spheres = []
    for i, sd in enumerate(spheres_doc):
        field = f"spheres[{i}]"
        spheres.append(
            build(
                field,
                Sphere,
                int(_get(sd, "id", field)),
                np.array(_get(sd, "track", field), dtype=float),
                np.array(_get(sd, "normalized_depths", field), dtype=float),
                tuple(_get(sd, "color", field)),
            )
        )
    sphere_set = build("spheres", SphereSet, tuple(spheres))

    env_doc = _get(doc, "envelope", "envelope")
    envelope = build(
        "envelope",
        WorldEnvelope,
        side_length=_get(env_doc, "side_length", "envelope"),
        checker_cell=_get(env_doc, "checker_cell", "envelope"),
        color_a=tuple(_get(env_doc, "color_a", "envelope")),
        color_b=tuple(_get(env_doc, "color_b", "envelope")),
        face_tints=tuple(tuple(t) for t in _get(env_doc, "face_tints", "envelope")),
    )

    rp_doc = _get(doc, "render_params", "render_params")
    render_params = build(
        "render_params",
        RenderParams,
        _get(rp_doc, "r_min", "render_params"),
        _get(rp_doc, "r_max", "render_params"),
    )

    depth_range = doc.get("depth_range")
    if depth_range is not None:
        if not (isinstance(depth_range, list) and len(depth_range) == 2):
            raise SemanticError("depth_range must be [z_min, z_max] or null", field="depth_range")
        depth_range = (float(depth_range[0]), float(depth_range[1]))

    return build(
        "scene",
        MotionScene,
        width=int(_get(doc, "width", "width")),
        height=int(_get(doc, "height", "height")),
        trajectory=trajectory,
        spheres=sphere_set,
        envelope=envelope,
        render_params=render_params,
        depth_range=depth_range,
    )


def parse_scene(text: str) -> MotionScene:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(
            f"scene document is not valid JSON: {exc.msg}",
            line=exc.lineno,
            column=exc.colno,
        ) from exc
    return scene_from_dict(doc)


def load_scene(path: str | Path) -> MotionScene:
    path = Path(path)
    try:
        return parse_scene(path.read_text())
    except FormatError as exc:
        if exc.path is None:
            exc.path = str(path)
            exc.args = (f"{path}: {exc.args[0]}",) + exc.args[1:]
        raise


def save_scene(scene: MotionScene, path: str | Path) -> None:
    Path(path).write_text(serialize_scene(scene))
