"""Core scene representation: camera trajectory, tracked spheres, envelope.

Conventions fixed here and relied on everywhere else:

* The world frame is the camera frame of frame 1, so an aligned
  trajectory starts at the identity pose.
* Extrinsics map world to camera: ``x_cam = R @ x_world + t``.
* Frame indices are 1-based in every public operation.
* All value types are immutable after construction (arrays are marked
  non-writeable), so scenes can be shared freely across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidArgumentError, InvalidPoseError
from .rotations import ORTHONORMALITY_TOL, is_orthonormal

# Behind-camera culling threshold for perspective projection, world units.
EPS_Z = 1e-6

# Render defaults, expressed at a 512-px short image side and scaled
# linearly with min(W, H)/512.
BASE_R_MIN = 2.0
BASE_R_MAX = 14.0
BASE_SHORT_SIDE = 512.0

DEFAULT_Z_FAR = 100.0
DEFAULT_CHECKER_DIVISIONS = 16
DEFAULT_COLOR_A = (255, 255, 255)
DEFAULT_COLOR_B = (40, 40, 40)
# Pastel multipliers per axis pair (+-x, +-y, +-z) keep the six cube
# faces tellable apart without drowning the checker contrast.
DEFAULT_FACE_TINTS = (
    (1.0, 0.85, 0.85),
    (1.0, 0.85, 0.85),
    (0.85, 1.0, 0.85),
    (0.85, 1.0, 0.85),
    (0.85, 0.85, 1.0),
    (0.85, 0.85, 1.0),
)


def _freeze(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=float)
    out.flags.writeable = False
    return out


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


@dataclass(frozen=True)
class CameraIntrinsics:
    """Pinhole parameters in pixels. Principal point invariants against the
    image size are enforced by MotionScene, which knows the dimensions."""

    fx: float
    fy: float
    cx: float
    cy: float

    def __post_init__(self):
        for name in ("fx", "fy", "cx", "cy"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise InvalidArgumentError(f"intrinsics.{name} must be finite, got {v}")
        if self.fx <= 0 or self.fy <= 0:
            raise InvalidArgumentError(
                f"focal lengths must be positive, got fx={self.fx}, fy={self.fy}"
            )

    def scaled_focal(self, multiplier: float) -> "CameraIntrinsics":
        return CameraIntrinsics(self.fx * multiplier, self.fy * multiplier, self.cx, self.cy)


def default_intrinsics(width: int, height: int) -> CameraIntrinsics:
    """Default pinhole model: fx = W, fy = H, principal point at the
    integer image center (floor division)."""
    if width < 2 or height < 2:
        raise InvalidArgumentError(f"image must be at least 2x2, got {width}x{height}")
    return CameraIntrinsics(float(width), float(height), float(width // 2), float(height // 2))


@dataclass(frozen=True, eq=False)
class CameraPose:
    """World-to-camera rigid transform: x_cam = rotation @ x_world + translation."""

    rotation: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        r = _freeze(self.rotation)
        t = _freeze(self.translation)
        if r.shape != (3, 3):
            raise InvalidPoseError(f"rotation must be 3x3, got shape {r.shape}")
        if t.shape != (3,):
            raise InvalidPoseError(f"translation must be a 3-vector, got shape {t.shape}")
        if not np.all(np.isfinite(t)):
            raise InvalidPoseError("translation must be finite")
        if not is_orthonormal(r, ORTHONORMALITY_TOL):
            raise InvalidPoseError("rotation is not orthonormal with determinant +1")
        object.__setattr__(self, "rotation", r)
        object.__setattr__(self, "translation", t)

    @classmethod
    def identity(cls) -> "CameraPose":
        return cls(np.eye(3), np.zeros(3))

    def compose(self, other: "CameraPose") -> "CameraPose":
        """self after other: (self . other)(x) = self(other(x))."""
        return CameraPose(
            self.rotation @ other.rotation,
            self.rotation @ other.translation + self.translation,
        )

    def inverse(self) -> "CameraPose":
        return CameraPose(self.rotation.T, -(self.rotation.T @ self.translation))

    def camera_center(self) -> np.ndarray:
        """Camera center in world coordinates: -R^T t."""
        return -(self.rotation.T @ self.translation)

    def transform(self, points: np.ndarray) -> np.ndarray:
        """Apply to an (..., 3) array of world points."""
        pts = np.asarray(points, dtype=float)
        return pts @ self.rotation.T + self.translation

    def matrix(self) -> np.ndarray:
        """3x4 [R | t]."""
        return np.hstack([self.rotation, self.translation[:, None]])

    def is_identity(self, tol: float = 1e-9) -> bool:
        return (
            np.max(np.abs(self.rotation - np.eye(3))) < tol
            and np.max(np.abs(self.translation)) < tol
        )

    def __eq__(self, other):
        if not isinstance(other, CameraPose):
            return NotImplemented
        return np.array_equal(self.rotation, other.rotation) and np.array_equal(
            self.translation, other.translation
        )


@dataclass(frozen=True, eq=False)
class CameraFrame:
    intrinsics: CameraIntrinsics
    pose: CameraPose

    def __eq__(self, other):
        if not isinstance(other, CameraFrame):
            return NotImplemented
        return self.intrinsics == other.intrinsics and self.pose == other.pose


@dataclass(frozen=True, eq=False)
class CameraTrajectory:
    """Per-frame intrinsics and extrinsics, length >= 1."""

    frames: tuple[CameraFrame, ...]

    def __post_init__(self):
        frames = tuple(self.frames)
        if not frames:
            raise InvalidArgumentError("trajectory must contain at least one frame")
        cx, cy = frames[0].intrinsics.cx, frames[0].intrinsics.cy
        for i, f in enumerate(frames):
            if abs(f.intrinsics.cx - cx) > 1e-9 or abs(f.intrinsics.cy - cy) > 1e-9:
                raise InvalidArgumentError(
                    f"frame {i + 1} principal point differs from frame 1; "
                    "all frames must share one principal-point convention"
                )
        object.__setattr__(self, "frames", frames)

    def __len__(self) -> int:
        return len(self.frames)

    def frame(self, frame_index: int) -> CameraFrame:
        """1-based frame access with range checking."""
        if not 1 <= frame_index <= len(self.frames):
            raise InvalidArgumentError(
                f"frame index {frame_index} out of range [1, {len(self.frames)}]"
            )
        return self.frames[frame_index - 1]

    def poses(self) -> list[CameraPose]:
        return [f.pose for f in self.frames]

    def __eq__(self, other):
        if not isinstance(other, CameraTrajectory):
            return NotImplemented
        return self.frames == other.frames

    @classmethod
    def static(cls, intrinsics: CameraIntrinsics, length: int) -> "CameraTrajectory":
        if length < 1:
            raise InvalidArgumentError(f"trajectory length must be >= 1, got {length}")
        identity = CameraPose.identity()
        return cls(tuple(CameraFrame(intrinsics, identity) for _ in range(length)))


@dataclass(frozen=True, eq=False)
class Sphere:
    """One tracked key part: a 3D track plus its per-frame normalized depth
    and the color it was assigned from the frame-1 color map."""

    id: int
    track: np.ndarray
    normalized_depths: np.ndarray
    color: tuple[int, int, int]

    def __post_init__(self):
        track = _freeze(self.track)
        depths = _freeze(self.normalized_depths)
        if track.ndim != 2 or track.shape[1] != 3 or track.shape[0] < 1:
            raise InvalidArgumentError(f"track must be (L, 3) with L >= 1, got {track.shape}")
        if not np.all(np.isfinite(track)):
            raise InvalidArgumentError(f"sphere {self.id}: track contains non-finite values")
        if depths.shape != (track.shape[0],):
            raise InvalidArgumentError(
                f"sphere {self.id}: normalized_depths length {depths.shape} "
                f"does not match track length {track.shape[0]}"
            )
        if np.any(depths < 0.0) or np.any(depths > 1.0):
            raise InvalidArgumentError(f"sphere {self.id}: normalized depths must lie in [0, 1]")
        color = tuple(int(c) for c in self.color)
        if len(color) != 3 or any(not 0 <= c <= 255 for c in color):
            raise InvalidArgumentError(f"sphere {self.id}: color must be an 8-bit RGB triple")
        object.__setattr__(self, "track", track)
        object.__setattr__(self, "normalized_depths", depths)
        object.__setattr__(self, "color", color)

    def __len__(self) -> int:
        return self.track.shape[0]

    def __eq__(self, other):
        if not isinstance(other, Sphere):
            return NotImplemented
        return (
            self.id == other.id
            and self.color == other.color
            and np.array_equal(self.track, other.track)
            and np.array_equal(self.normalized_depths, other.normalized_depths)
        )


@dataclass(frozen=True, eq=False)
class SphereSet:
    spheres: tuple[Sphere, ...]

    def __post_init__(self):
        spheres = tuple(self.spheres)
        ids = [s.id for s in spheres]
        if len(set(ids)) != len(ids):
            raise InvalidArgumentError("sphere ids must be unique")
        lengths = {len(s) for s in spheres}
        if len(lengths) > 1:
            raise InvalidArgumentError(f"all sphere tracks must share one length, got {lengths}")
        object.__setattr__(self, "spheres", spheres)

    def __len__(self) -> int:
        return len(self.spheres)

    def __iter__(self):
        return iter(self.spheres)

    def track_length_frames(self) -> int | None:
        """Shared track length L, or None for an empty set."""
        return len(self.spheres[0]) if self.spheres else None

    def by_id(self, sphere_id: int) -> Sphere:
        for s in self.spheres:
            if s.id == sphere_id:
                return s
        raise InvalidArgumentError(f"no sphere with id {sphere_id}")

    def __eq__(self, other):
        if not isinstance(other, SphereSet):
            return NotImplemented
        return self.spheres == other.spheres


@dataclass(frozen=True, eq=False)
class WorldEnvelope:
    """Axis-aligned checkerboard cube centered at the world origin. The side
    length doubles as the far clipping distance of the scene."""

    side_length: float = DEFAULT_Z_FAR
    checker_cell: float = DEFAULT_Z_FAR / DEFAULT_CHECKER_DIVISIONS
    color_a: tuple[int, int, int] = DEFAULT_COLOR_A
    color_b: tuple[int, int, int] = DEFAULT_COLOR_B
    face_tints: tuple[tuple[float, float, float], ...] = DEFAULT_FACE_TINTS

    def __post_init__(self):
        if not (math.isfinite(self.side_length) and self.side_length > 0):
            raise InvalidArgumentError(f"side_length must be positive, got {self.side_length}")
        if not (math.isfinite(self.checker_cell) and self.checker_cell > 0):
            raise InvalidArgumentError(f"checker_cell must be positive, got {self.checker_cell}")
        if self.checker_cell > self.side_length:
            raise InvalidArgumentError(
                f"checker_cell {self.checker_cell} exceeds side_length {self.side_length}"
            )
        for name in ("color_a", "color_b"):
            c = tuple(int(v) for v in getattr(self, name))
            if len(c) != 3 or any(not 0 <= v <= 255 for v in c):
                raise InvalidArgumentError(f"{name} must be an 8-bit RGB triple")
            object.__setattr__(self, name, c)
        tints = tuple(tuple(float(v) for v in t) for t in self.face_tints)
        if len(tints) != 6 or any(len(t) != 3 for t in tints):
            raise InvalidArgumentError("face_tints must hold six RGB multiplier triples")
        if any(not (0.0 <= v <= 1.0) for t in tints for v in t):
            raise InvalidArgumentError("face tint multipliers must lie in [0, 1]")
        object.__setattr__(self, "face_tints", tints)

    def face_colors(self) -> np.ndarray:
        """(6, 2, 3) uint8: tinted checker colors [face, parity even/odd]."""
        out = np.empty((6, 2, 3), dtype=np.uint8)
        for face, tint in enumerate(self.face_tints):
            for parity, base in enumerate((self.color_a, self.color_b)):
                out[face, parity] = [
                    _round_half_up(base[ch] * tint[ch]) for ch in range(3)
                ]
        return out

    def __eq__(self, other):
        if not isinstance(other, WorldEnvelope):
            return NotImplemented
        return (
            self.side_length == other.side_length
            and self.checker_cell == other.checker_cell
            and self.color_a == other.color_a
            and self.color_b == other.color_b
            and self.face_tints == other.face_tints
        )


@dataclass(frozen=True)
class RenderParams:
    """Projected circle radius range in pixels; depth 1 maps to r_min and
    depth 0 to r_max."""

    r_min: float
    r_max: float

    def __post_init__(self):
        if not (math.isfinite(self.r_min) and math.isfinite(self.r_max)):
            raise InvalidArgumentError("render radii must be finite")
        if self.r_min < 0:
            raise InvalidArgumentError(f"r_min must be >= 0, got {self.r_min}")
        if self.r_min > self.r_max:
            raise InvalidArgumentError(
                f"r_min {self.r_min} must not exceed r_max {self.r_max}"
            )

    def radius_for_depth(self, normalized_depth: float) -> float:
        return self.r_min + (self.r_max - self.r_min) * (1.0 - normalized_depth)


def default_render_params(width: int, height: int) -> RenderParams:
    scale = min(width, height) / BASE_SHORT_SIDE
    return RenderParams(BASE_R_MIN * scale, BASE_R_MAX * scale)


@dataclass(frozen=True, eq=False)
class MotionScene:
    """Everything needed to render one clip's control signals.

    depth_range records the (z_min, z_max) mapping used to normalize sphere
    depths, so later edits can renormalize consistently; None means the
    scene was built without tracks (or with degenerate depth spread).
    """

    width: int
    height: int
    trajectory: CameraTrajectory
    spheres: SphereSet
    envelope: WorldEnvelope
    render_params: RenderParams
    depth_range: tuple[float, float] | None = None

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise InvalidArgumentError(
                f"scene dimensions must be positive, got {self.width}x{self.height}"
            )
        sphere_len = self.spheres.track_length_frames()
        if sphere_len is not None and sphere_len != len(self.trajectory):
            raise InvalidArgumentError(
                f"sphere tracks have length {sphere_len} but trajectory has "
                f"{len(self.trajectory)} frames"
            )
        for i, f in enumerate(self.trajectory.frames):
            if not (0 <= f.intrinsics.cx < self.width and 0 <= f.intrinsics.cy < self.height):
                raise InvalidArgumentError(
                    f"frame {i + 1} principal point ({f.intrinsics.cx}, {f.intrinsics.cy}) "
                    f"outside the {self.width}x{self.height} image"
                )
        if self.depth_range is not None:
            lo, hi = self.depth_range
            if not (math.isfinite(lo) and math.isfinite(hi) and lo <= hi):
                raise InvalidArgumentError(f"invalid depth_range {self.depth_range}")
            object.__setattr__(self, "depth_range", (float(lo), float(hi)))

    @property
    def frame_count(self) -> int:
        return len(self.trajectory)

    def __eq__(self, other):
        if not isinstance(other, MotionScene):
            return NotImplemented
        return (
            self.width == other.width
            and self.height == other.height
            and self.trajectory == other.trajectory
            and self.spheres == other.spheres
            and self.envelope == other.envelope
            and self.render_params == other.render_params
            and self.depth_range == other.depth_range
        )

    def with_spheres(self, spheres: SphereSet) -> "MotionScene":
        return MotionScene(
            self.width, self.height, self.trajectory, spheres,
            self.envelope, self.render_params, self.depth_range,
        )

    def with_trajectory(self, trajectory: CameraTrajectory) -> "MotionScene":
        return MotionScene(
            self.width, self.height, trajectory, self.spheres,
            self.envelope, self.render_params, self.depth_range,
        )


def align_to_first_frame(raw_poses: Sequence[CameraPose]) -> list[CameraPose]:
    """Re-express every pose relative to the first one, so the returned
    sequence starts at the identity: out_l = raw_l . inverse(raw_1)."""
    poses = list(raw_poses)
    if not poses:
        raise InvalidArgumentError("cannot align an empty pose list")
    base_inv = poses[0].inverse()
    return [p.compose(base_inv) for p in poses]


def normalize_depths(z_values: np.ndarray) -> np.ndarray:
    """Min-max normalize camera-frame z values over the whole clip (all
    frames and points jointly). A degenerate clip (z_max == z_min) maps
    everything to 0.5."""
    z = np.asarray(z_values, dtype=float)
    if z.size == 0:
        raise InvalidArgumentError("cannot normalize an empty depth array")
    if not np.all(np.isfinite(z)):
        raise InvalidArgumentError("depth values must be finite")
    z_min, z_max = float(z.min()), float(z.max())
    if z_max == z_min:
        return np.full(z.shape, 0.5)
    return (z - z_min) / (z_max - z_min)


def color_map_at(u: float, v: float, width: int, height: int) -> tuple[int, int, int]:
    """Continuous frame-1 color map: red ramps with u, green with v, blue
    fixed at 128. Positions are clamped into the image rectangle."""
    u = min(max(u, 0.0), float(width - 1))
    v = min(max(v, 0.0), float(height - 1))
    r = _round_half_up(255.0 * u / (width - 1)) if width > 1 else 0
    g = _round_half_up(255.0 * v / (height - 1)) if height > 1 else 0
    return (r, g, 128)


def assign_colors(
    first_frame_centers: Iterable[tuple[float, float]], width: int, height: int
) -> list[tuple[int, int, int]]:
    """Per-sphere colors sampled from the color map at each sphere's
    frame-1 projected center."""
    if width <= 0 or height <= 0:
        raise InvalidArgumentError(f"bad image size {width}x{height}")
    return [color_map_at(u, v, width, height) for u, v in first_frame_centers]


def _first_frame_centers(
    trajectory: CameraTrajectory, tracks: np.ndarray
) -> list[tuple[float, float]]:
    """Frame-1 projected centers for color assignment. Points at or behind
    the frame-1 camera get a clamped-depth projection so every sphere still
    receives a deterministic color."""
    frame = trajectory.frames[0]
    cam = frame.pose.transform(tracks[0])
    z = np.maximum(cam[:, 2], EPS_Z)
    u = frame.intrinsics.fx * cam[:, 0] / z + frame.intrinsics.cx
    v = frame.intrinsics.fy * cam[:, 1] / z + frame.intrinsics.cy
    return list(zip(u.tolist(), v.tolist()))


def build_scene(
    width: int,
    height: int,
    trajectory: CameraTrajectory,
    tracks: np.ndarray | Sequence,
    envelope: WorldEnvelope | None = None,
    render_params: RenderParams | None = None,
    *,
    sphere_ids: Sequence[int] | None = None,
) -> MotionScene:
    """Assemble a validated scene from raw (L, N, 3) world tracks.

    Normalized depths are computed per clip over all tracks jointly and the
    resulting (z_min, z_max) mapping is recorded on the scene; colors come
    from each sphere's frame-1 projected center.
    """
    if width <= 0 or height <= 0:
        raise InvalidArgumentError(f"scene dimensions must be positive, got {width}x{height}")
    tracks = np.asarray(tracks, dtype=float)
    if tracks.size == 0:
        tracks = tracks.reshape(len(trajectory), 0, 3)
    if tracks.ndim != 3 or tracks.shape[2] != 3:
        raise InvalidArgumentError(f"tracks must have shape (L, N, 3), got {tracks.shape}")
    if tracks.shape[0] != len(trajectory):
        raise InvalidArgumentError(
            f"tracks have {tracks.shape[0]} frames but trajectory has {len(trajectory)}"
        )
    if not np.all(np.isfinite(tracks)):
        raise InvalidArgumentError("tracks contain non-finite values")

    n = tracks.shape[1]
    if sphere_ids is None:
        sphere_ids = range(n)
    else:
        sphere_ids = list(sphere_ids)
        if len(sphere_ids) != n:
            raise InvalidArgumentError(
                f"{len(sphere_ids)} sphere ids supplied for {n} tracks"
            )

    envelope = envelope if envelope is not None else WorldEnvelope()
    render_params = (
        render_params if render_params is not None else default_render_params(width, height)
    )

    depth_range: tuple[float, float] | None = None
    spheres: list[Sphere] = []
    if n > 0:
        z = tracks[:, :, 2]
        depths = normalize_depths(z)
        depth_range = (float(z.min()), float(z.max()))
        colors = assign_colors(_first_frame_centers(trajectory, tracks), width, height)
        spheres = [
            Sphere(sid, tracks[:, i, :], depths[:, i], colors[i])
            for i, sid in enumerate(sphere_ids)
        ]

    return MotionScene(
        width=width,
        height=height,
        trajectory=trajectory,
        spheres=SphereSet(tuple(spheres)),
        envelope=envelope,
        render_params=render_params,
        depth_range=depth_range,
    )


def normalize_with_range(
    z_values: np.ndarray, depth_range: tuple[float, float] | None
) -> np.ndarray:
    """Normalize z values against a scene's stored depth mapping, clamping
    into [0, 1]. Without a usable range everything maps to 0.5."""
    z = np.asarray(z_values, dtype=float)
    if not np.all(np.isfinite(z)):
        raise InvalidArgumentError("depth values must be finite")
    if depth_range is None or depth_range[1] == depth_range[0]:
        return np.full(z.shape, 0.5)
    lo, hi = depth_range
    return np.clip((z - lo) / (hi - lo), 0.0, 1.0)
