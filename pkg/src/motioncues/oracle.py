"""Brute-force reference renderer used to cross-check the fast rasterizers.

Sphere layer: every pixel independently picks the nearest (minimum
normalized depth) covering circle instead of painting far-to-near.
Envelope layer: every pixel tests all six cube faces instead of the
per-axis slab shortcut. Same contracts, different algorithms; the test
suite requires byte equality between the two.
"""

from __future__ import annotations

import numpy as np

from .errors import CameraEscapedEnvelopeError, InvalidArgumentError
from .projection import project_sphere_set
from .scene import MotionScene

# Face order: +x, -x, +y, -y, +z, -z. Ties (edge/corner hits) resolve to
# the earliest face in this order, which matches the fast renderer's
# first-axis argmin rule.
_FACES = ((0, 1.0), (0, -1.0), (1, 1.0), (1, -1.0), (2, 1.0), (2, -1.0))


def oracle_sphere_layer(scene: MotionScene, frame_index: int) -> np.ndarray:
    circles = project_sphere_set(scene, frame_index)
    h, w = scene.height, scene.width
    img = np.zeros((h, w, 3), dtype=np.uint8)
    best_depth = np.full((h, w), np.inf)
    xs = np.arange(w) + 0.5
    ys = np.arange(h) + 0.5
    for c in circles:
        if not c.visible:
            continue
        covered = (ys[:, None] - c.v) ** 2 + (xs[None, :] - c.u) ** 2 <= c.radius * c.radius
        # <= lets an equal-depth, later-listed circle win, like the painter.
        wins = covered & (c.depth <= best_depth)
        best_depth[wins] = c.depth
        img[wins] = c.color
    return img


def oracle_envelope_layer(scene: MotionScene, frame_index: int) -> np.ndarray:
    frame = scene.trajectory.frame(frame_index)
    env = scene.envelope
    half = env.side_length / 2.0
    center = frame.pose.camera_center()
    if np.max(np.abs(center)) >= half:
        raise CameraEscapedEnvelopeError(
            f"camera center {center.tolist()} is outside the envelope at frame {frame_index}",
            frame_index=frame_index,
        )

    h, w = scene.height, scene.width
    u = (np.arange(w) + 0.5 - frame.intrinsics.cx) / frame.intrinsics.fx
    v = (np.arange(h) + 0.5 - frame.intrinsics.cy) / frame.intrinsics.fy
    dirs = np.empty((h, w, 3))
    dirs[:, :, 0] = u[None, :]
    dirs[:, :, 1] = v[:, None]
    dirs[:, :, 2] = 1.0
    dirs = dirs @ frame.pose.rotation

    bound_tol = half + env.side_length * 1e-12 + 1e-12
    best_t = np.full((h, w), np.inf)
    face_sel = np.full((h, w), -1, dtype=np.int64)
    for face_id, (axis, sign) in enumerate(_FACES):
        d = dirs[:, :, axis]
        with np.errstate(divide="ignore", invalid="ignore"):
            t = (sign * half - center[axis]) / d
        a0, a1 = [k for k in range(3) if k != axis]
        pa = center[a0] + t * dirs[:, :, a0]
        pb = center[a1] + t * dirs[:, :, a1]
        ok = (
            np.isfinite(t)
            & (t > 0)
            & (np.abs(pa) <= bound_tol)
            & (np.abs(pb) <= bound_tol)
            & (t < best_t)
        )
        best_t[ok] = t[ok]
        face_sel[ok] = face_id

    if np.any(face_sel < 0):
        raise AssertionError("envelope ray cast left uncovered pixels")

    hit = center[None, None, :] + best_t[:, :, None] * dirs
    cell = np.floor(hit / env.checker_cell).astype(np.int64)
    img = np.empty((h, w, 3), dtype=np.uint8)
    face_colors = env.face_colors()
    for face_id, (axis, _) in enumerate(_FACES):
        sel = face_sel == face_id
        if not np.any(sel):
            continue
        a0, a1 = [k for k in range(3) if k != axis]
        parity = (cell[:, :, a0] + cell[:, :, a1]) & 1
        img[sel] = face_colors[face_id, parity[sel]]
    return img


def oracle_render(scene: MotionScene, frame_index: int, layer: str) -> np.ndarray:
    """Reference render of one layer: 'spheres' or 'envelope'."""
    if layer == "spheres":
        return oracle_sphere_layer(scene, frame_index)
    if layer == "envelope":
        return oracle_envelope_layer(scene, frame_index)
    raise InvalidArgumentError(f"unknown layer {layer!r}; expected 'spheres' or 'envelope'")
