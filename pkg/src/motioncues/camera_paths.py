"""Parametric camera trajectory generators and pose-sequence metrics.

Axis conventions follow the projection model: +x right, +y down,
+z forward, world frame = frame-1 camera frame. "Left"/"up" therefore
mean -x/-y in world coordinates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError
from .rotations import geodesic_angle_deg, rot_x, rot_y
from .scene import CameraFrame, CameraIntrinsics, CameraPose, CameraTrajectory

ROTATIONAL_KINDS = frozenset({"pan_left", "pan_right", "tilt_up", "tilt_down"})
TRANSLATIONAL_KINDS = frozenset(
    {"dolly_in", "dolly_out", "truck_left", "truck_right", "pedestal_up", "pedestal_down"}
)
ORBIT_KINDS = frozenset({"orbit_left", "orbit_right"})
ZOOM_KINDS = frozenset({"zoom_in", "zoom_out"})
MOVE_KINDS = ROTATIONAL_KINDS | TRANSLATIONAL_KINDS | ORBIT_KINDS | ZOOM_KINDS | {"static"}

DEFAULT_PIVOT_DISTANCE = 10.0  # world units; z_far/10 with the default envelope

# Unit camera-center displacement per translational kind (world frame,
# y points down). Extrinsic translation is t = -R c with R = I.
_MOVE_DIRECTIONS = {
    "dolly_in": (0.0, 0.0, 1.0),
    "dolly_out": (0.0, 0.0, -1.0),
    "truck_left": (-1.0, 0.0, 0.0),
    "truck_right": (1.0, 0.0, 0.0),
    "pedestal_up": (0.0, -1.0, 0.0),
    "pedestal_down": (0.0, 1.0, 0.0),
}


@dataclass(frozen=True)
class CameraMoveSpec:
    """One preset move. magnitude means total degrees for rotational and
    orbit kinds, total world-unit distance for translational kinds, and
    the final focal multiplier for zoom kinds."""

    kind: str
    magnitude: float = 0.0
    frames: int = 16
    pivot_distance: float = DEFAULT_PIVOT_DISTANCE

    def __post_init__(self):
        if self.kind not in MOVE_KINDS:
            raise InvalidArgumentError(
                f"unknown camera move {self.kind!r}; expected one of {sorted(MOVE_KINDS)}"
            )
        if self.frames < 1:
            raise InvalidArgumentError(f"frames must be >= 1, got {self.frames}")
        if not math.isfinite(self.magnitude):
            raise InvalidArgumentError("magnitude must be finite")
        if self.kind in ZOOM_KINDS and self.magnitude <= 0:
            raise InvalidArgumentError(
                f"zoom multiplier must be positive, got {self.magnitude}"
            )
        if self.kind in ORBIT_KINDS and self.pivot_distance <= 0:
            raise InvalidArgumentError(
                f"orbit pivot distance must be positive, got {self.pivot_distance}"
            )


def _pose_for(kind: str, amount: float, pivot_distance: float) -> CameraPose:
    """Pose at one interpolation step; amount is degrees or world units."""
    if kind == "static" or kind in ZOOM_KINDS:
        return CameraPose.identity()
    if kind in ROTATIONAL_KINDS:
        theta = math.radians(amount)
        if kind == "pan_left":
            r = rot_y(theta)
        elif kind == "pan_right":
            r = rot_y(-theta)
        elif kind == "tilt_up":
            r = rot_x(-theta)
        else:  # tilt_down
            r = rot_x(theta)
        return CameraPose(r, np.zeros(3))
    if kind in _MOVE_DIRECTIONS:
        center = amount * np.asarray(_MOVE_DIRECTIONS[kind])
        return CameraPose(np.eye(3), -center)
    # Orbit: swing the camera on a horizontal circle of radius
    # pivot_distance around the pivot (0, 0, pivot_distance), always
    # facing it, so the pivot stays projected at the principal point.
    alpha = math.radians(amount if kind == "orbit_left" else -amount)
    p = pivot_distance
    center = np.array([-p * math.sin(alpha), 0.0, p - p * math.cos(alpha)])
    r = rot_y(-alpha)
    return CameraPose(r, -(r @ center))


def generate(spec: CameraMoveSpec, base_intrinsics: CameraIntrinsics) -> CameraTrajectory:
    """Trajectory for one preset move: frame 1 is the identity pose with the
    base intrinsics; the motion parameter interpolates linearly (zoom:
    log-linearly in focal length) up to the magnitude at the last frame."""
    frames = []
    for l in range(spec.frames):
        s = l / (spec.frames - 1) if spec.frames > 1 else 0.0
        if spec.kind in ZOOM_KINDS:
            exponent = s if spec.kind == "zoom_in" else -s
            intr = base_intrinsics.scaled_focal(spec.magnitude**exponent)
        else:
            intr = base_intrinsics
        frames.append(CameraFrame(intr, _pose_for(spec.kind, spec.magnitude * s, spec.pivot_distance)))
    return CameraTrajectory(tuple(frames))


def compose(a: CameraTrajectory, b: CameraTrajectory) -> CameraTrajectory:
    """Combine two same-length moves frame by frame: poses compose as
    b-after-a, focal multipliers (relative to the shared frame-1 base)
    multiply."""
    if len(a) != len(b):
        raise InvalidArgumentError(
            f"cannot compose trajectories of lengths {len(a)} and {len(b)}"
        )
    base = a.frames[0].intrinsics
    other = b.frames[0].intrinsics
    if any(
        abs(x - y) > 1e-9
        for x, y in ((base.fx, other.fx), (base.fy, other.fy), (base.cx, other.cx), (base.cy, other.cy))
    ):
        raise InvalidArgumentError("composed trajectories must share frame-1 intrinsics")
    frames = []
    for fa, fb in zip(a.frames, b.frames):
        fx = base.fx * (fa.intrinsics.fx / base.fx) * (fb.intrinsics.fx / base.fx)
        fy = base.fy * (fa.intrinsics.fy / base.fy) * (fb.intrinsics.fy / base.fy)
        frames.append(
            CameraFrame(CameraIntrinsics(fx, fy, base.cx, base.cy), fb.pose.compose(fa.pose))
        )
    return CameraTrajectory(tuple(frames))


def rot_err(gt: CameraTrajectory, pred: CameraTrajectory) -> float:
    """Mean per-frame geodesic rotation angle between the two pose
    sequences, in degrees."""
    if len(gt) != len(pred):
        raise InvalidArgumentError(f"trajectory lengths differ: {len(gt)} vs {len(pred)}")
    angles = [
        geodesic_angle_deg(fg.pose.rotation, fp.pose.rotation)
        for fg, fp in zip(gt.frames, pred.frames)
    ]
    return float(np.mean(angles))


def trans_err(gt: CameraTrajectory, pred: CameraTrajectory) -> float:
    """Mean distance between per-frame camera centers after normalizing each
    trajectory by its largest center norm (skipped for static-at-origin
    trajectories)."""
    if len(gt) != len(pred):
        raise InvalidArgumentError(f"trajectory lengths differ: {len(gt)} vs {len(pred)}")

    def normalized_centers(traj: CameraTrajectory) -> np.ndarray:
        centers = np.stack([f.pose.camera_center() for f in traj.frames])
        max_norm = float(np.max(np.linalg.norm(centers, axis=1)))
        if max_norm >= 1e-9:
            centers = centers / max_norm
        return centers

    diff = normalized_centers(gt) - normalized_centers(pred)
    return float(np.mean(np.linalg.norm(diff, axis=1)))
