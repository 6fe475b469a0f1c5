"""Perspective projection, its inverse, and per-frame circle projection."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError
from .scene import EPS_Z, CameraIntrinsics, CameraPose, MotionScene


@dataclass(frozen=True)
class ProjectedCircle:
    """A sphere as seen in one frame. Invisible circles (behind the camera)
    carry NaN centers and contribute no pixels."""

    sphere_id: int
    u: float
    v: float
    radius: float
    depth: float
    color: tuple[int, int, int]
    visible: bool


def project_point(
    intrinsics: CameraIntrinsics, pose: CameraPose, point
) -> tuple[float, float, float] | None:
    """Project a world point; returns (u, v, z_cam) or None when the point
    is at or behind the camera plane (z_cam <= EPS_Z)."""
    x, y, z = pose.transform(np.asarray(point, dtype=float))
    if z <= EPS_Z:
        return None
    return (
        float(intrinsics.fx * x / z + intrinsics.cx),
        float(intrinsics.fy * y / z + intrinsics.cy),
        float(z),
    )


def unproject_pixel(
    intrinsics: CameraIntrinsics, pose: CameraPose, u: float, v: float, depth: float
) -> np.ndarray:
    """Inverse of project_point at a given camera-frame depth (z_cam)."""
    if not (math.isfinite(depth) and depth > 0):
        raise InvalidArgumentError(f"unprojection depth must be positive, got {depth}")
    cam = np.array(
        [
            (u - intrinsics.cx) / intrinsics.fx * depth,
            (v - intrinsics.cy) / intrinsics.fy * depth,
            depth,
        ]
    )
    return pose.rotation.T @ (cam - pose.translation)


def project_track_points(
    intrinsics: CameraIntrinsics, pose: CameraPose, points: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized projection of (N, 3) world points.

    Returns (u, v, z_cam) arrays; entries with z_cam <= EPS_Z are behind the
    camera and their u, v are NaN.
    """
    cam = pose.transform(np.asarray(points, dtype=float))
    z = cam[:, 2]
    in_front = z > EPS_Z
    with np.errstate(divide="ignore", invalid="ignore"):
        u = np.where(in_front, intrinsics.fx * cam[:, 0] / z + intrinsics.cx, np.nan)
        v = np.where(in_front, intrinsics.fy * cam[:, 1] / z + intrinsics.cy, np.nan)
    return u, v, z


def project_sphere_set(scene: MotionScene, frame_index: int) -> list[ProjectedCircle]:
    """All spheres of one frame as projected circles. The radius encodes the
    sphere's normalized depth for that frame: r_min + (r_max - r_min)(1 - d)."""
    frame = scene.trajectory.frame(frame_index)
    spheres = scene.spheres.spheres
    if not spheres:
        return []
    points = np.stack([s.track[frame_index - 1] for s in spheres])
    u, v, z = project_track_points(frame.intrinsics, frame.pose, points)
    circles = []
    for i, s in enumerate(spheres):
        depth = float(s.normalized_depths[frame_index - 1])
        circles.append(
            ProjectedCircle(
                sphere_id=s.id,
                u=float(u[i]),
                v=float(v[i]),
                radius=scene.render_params.radius_for_depth(depth),
                depth=depth,
                color=s.color,
                visible=bool(z[i] > EPS_Z),
            )
        )
    return circles
