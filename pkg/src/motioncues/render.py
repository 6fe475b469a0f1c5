"""Rasterizers for the two control-signal layers.

Both layers are hard-edged 8-bit RGB images and the whole pipeline is
bit-deterministic: the same scene always renders to byte-identical
output, which the test suite checks against an independent brute-force
implementation (see oracle.py).
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import CameraEscapedEnvelopeError, InvalidArgumentError
from .projection import ProjectedCircle, project_sphere_set
from .scene import MotionScene

# Cached camera-frame ray directions keyed by (W, H, fx, fy, cx, cy);
# identical for every frame of a fixed-intrinsics trajectory.
_DIRS_CACHE: dict[tuple, np.ndarray] = {}
_DIRS_CACHE_MAX = 8


@dataclass(frozen=True, eq=False)
class ControlSignalFrame:
    """Rendered pair for one frame: object layer (spheres) and camera
    layer (envelope)."""

    frame_index: int
    sphere_layer: np.ndarray
    envelope_layer: np.ndarray

    def __post_init__(self):
        if self.sphere_layer.shape != self.envelope_layer.shape:
            raise InvalidArgumentError("layer shapes differ")

    def __eq__(self, other):
        if not isinstance(other, ControlSignalFrame):
            return NotImplemented
        return (
            self.frame_index == other.frame_index
            and np.array_equal(self.sphere_layer, other.sphere_layer)
            and np.array_equal(self.envelope_layer, other.envelope_layer)
        )


def draw_circles(
    circles: list[ProjectedCircle], width: int, height: int
) -> np.ndarray:
    """Painter's-algorithm fill: far-to-near by normalized depth, so nearer
    circles overdraw farther ones; equal depths resolve by sphere order
    (later spheres on top). A pixel belongs to a circle when its center
    (i+0.5, j+0.5) lies inside the closed disk."""
    img = np.zeros((height, width, 3), dtype=np.uint8)
    order = sorted(range(len(circles)), key=lambda i: -circles[i].depth)
    for idx in order:
        c = circles[idx]
        if not c.visible:
            continue
        r = c.radius
        i0 = max(math.ceil(c.u - r - 0.5), 0)
        i1 = min(math.floor(c.u + r - 0.5), width - 1)
        j0 = max(math.ceil(c.v - r - 0.5), 0)
        j1 = min(math.floor(c.v + r - 0.5), height - 1)
        if i0 > i1 or j0 > j1:
            continue
        dx = np.arange(i0, i1 + 1) + 0.5 - c.u
        dy = np.arange(j0, j1 + 1) + 0.5 - c.v
        mask = dy[:, None] ** 2 + dx[None, :] ** 2 <= r * r
        img[j0 : j1 + 1, i0 : i1 + 1][mask] = c.color
    return img


def render_sphere_layer(scene: MotionScene, frame_index: int) -> np.ndarray:
    """Object control signal: colored depth-coded circles on black."""
    circles = project_sphere_set(scene, frame_index)
    return draw_circles(circles, scene.width, scene.height)


def _camera_ray_dirs(width: int, height: int, intrinsics) -> np.ndarray:
    """(H, W, 3) ray directions through pixel centers, camera frame."""
    key = (width, height, intrinsics.fx, intrinsics.fy, intrinsics.cx, intrinsics.cy)
    cached = _DIRS_CACHE.get(key)
    if cached is not None:
        return cached
    u = (np.arange(width) + 0.5 - intrinsics.cx) / intrinsics.fx
    v = (np.arange(height) + 0.5 - intrinsics.cy) / intrinsics.fy
    dirs = np.empty((height, width, 3))
    dirs[:, :, 0] = u[None, :]
    dirs[:, :, 1] = v[:, None]
    dirs[:, :, 2] = 1.0
    dirs.flags.writeable = False
    if len(_DIRS_CACHE) >= _DIRS_CACHE_MAX:
        _DIRS_CACHE.clear()
    _DIRS_CACHE[key] = dirs
    return dirs


def render_envelope_layer(scene: MotionScene, frame_index: int) -> np.ndarray:
    """Camera control signal: per-pixel ray cast against the checkerboard
    cube. Requires the camera center strictly inside the cube."""
    frame = scene.trajectory.frame(frame_index)
    env = scene.envelope
    half = env.side_length / 2.0
    center = frame.pose.camera_center()
    if np.max(np.abs(center)) >= half:
        raise CameraEscapedEnvelopeError(
            f"camera center {center.tolist()} is outside the envelope "
            f"(half side {half}) at frame {frame_index}",
            frame_index=frame_index,
        )

    dirs_cam = _camera_ray_dirs(scene.width, scene.height, frame.intrinsics)
    # World direction of a row vector d is R^T d, i.e. d @ R.
    dirs = dirs_cam.reshape(-1, 3) @ frame.pose.rotation

    # Slab exits: for each axis the ray leaves through the face its
    # direction component points at; the nearest of the three is the hit.
    exits = []
    with np.errstate(divide="ignore"):
        for axis in range(3):
            d = dirs[:, axis]
            bound = np.where(d > 0, half, -half)
            exits.append(np.where(d != 0.0, (bound - center[axis]) / d, np.inf))
    t = np.minimum(np.minimum(exits[0], exits[1]), exits[2])
    # first axis attaining the minimum, like argmin, but cheaper
    axis_sel = np.where(exits[0] == t, 0, np.where(exits[1] == t, 1, 2))

    hit = center[None, :] + t[:, None] * dirs
    # Checker parity from the two in-plane floors; summing all three and
    # subtracting the hit axis' floor avoids per-axis gathers. The floors
    # are integer-valued doubles, so this arithmetic is exact.
    cell_f = np.floor(hit / env.checker_cell)
    floor_sum = cell_f.sum(axis=1)
    floor_axis = np.take_along_axis(cell_f, axis_sel[:, None], axis=1)[:, 0]
    parity = ((floor_sum - floor_axis) % 2).astype(np.int64)
    d_axis = np.take_along_axis(dirs, axis_sel[:, None], axis=1)[:, 0]
    face = axis_sel * 2 + (d_axis <= 0)

    img = env.face_colors()[face, parity]
    return img.reshape(scene.height, scene.width, 3)


def render_frame(scene: MotionScene, frame_index: int) -> ControlSignalFrame:
    return ControlSignalFrame(
        frame_index=frame_index,
        sphere_layer=render_sphere_layer(scene, frame_index),
        envelope_layer=render_envelope_layer(scene, frame_index),
    )


def render_scene(scene: MotionScene) -> list[ControlSignalFrame]:
    """Both layers for every frame, in frame order. Frames render in a
    thread pool (they are independent pure functions of an immutable
    scene), but the output is deterministic: an equal scene always yields
    byte-identical frames regardless of scheduling."""
    if scene.frame_count == 1:
        return [render_frame(scene, 1)]
    workers = min(8, os.cpu_count() or 1, scene.frame_count)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda l: render_frame(scene, l), range(1, scene.frame_count + 1)))
