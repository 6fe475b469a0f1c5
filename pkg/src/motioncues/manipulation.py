"""Representation-side application workflows: lifting drawn trajectories,
cloning, transferring and editing motion before rendering."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    InvalidArgumentError,
    MissingDepthError,
    OutOfFrameError,
)
from .projection import project_sphere_set, project_track_points, unproject_pixel
from .scene import (
    EPS_Z,
    CameraFrame,
    CameraPose,
    CameraTrajectory,
    MotionScene,
    Sphere,
    SphereSet,
    build_scene,
    color_map_at,
    default_intrinsics,
    default_render_params,
    normalize_with_range,
)

# Anchors must land within this distance of a sphere's frame-1 projected
# center to select it.
MATCH_RADIUS_PX = 10.0

EDIT_MODES = frozenset({"freeze_spheres", "replace_spheres", "freeze_camera"})


@dataclass(frozen=True, eq=False)
class UserTrajectory:
    """A drawn path: (K, 2) pixel positions or (K, 3) world positions.
    depth_hint is the constant camera-frame z used to lift 2D paths when
    no depth map lookup is wanted."""

    points: np.ndarray
    depth_hint: float | None = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[0] < 1 or pts.shape[1] not in (2, 3):
            raise InvalidArgumentError(
                f"trajectory must be (K, 2) or (K, 3) with K >= 1, got shape {pts.shape}"
            )
        if not np.all(np.isfinite(pts)):
            raise InvalidArgumentError("trajectory contains non-finite values")
        if self.depth_hint is not None and not (
            math.isfinite(self.depth_hint) and self.depth_hint > 0
        ):
            raise InvalidArgumentError(f"depth hint must be positive, got {self.depth_hint}")
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)

    @property
    def is_2d(self) -> bool:
        return self.points.shape[1] == 2


@dataclass(frozen=True)
class CorrespondencePair:
    """Matching semantic point: source-clip first-frame pixel and the
    corresponding reference-image pixel."""

    source: tuple[float, float]
    target: tuple[float, float]


@dataclass(frozen=True, eq=False)
class EditDirective:
    """One edit step. mask selects the affected region (by frame-1 sphere
    centers); replacement tracks are required exactly for replace_spheres.
    freeze_camera ignores the mask and may omit it."""

    mode: str
    mask: np.ndarray | None = None
    replacement: tuple[np.ndarray, ...] | None = None

    def __post_init__(self):
        if self.mode not in EDIT_MODES:
            raise InvalidArgumentError(
                f"unknown edit mode {self.mode!r}; expected one of {sorted(EDIT_MODES)}"
            )
        if (self.replacement is not None) != (self.mode == "replace_spheres"):
            raise InvalidArgumentError(
                "replacement tracks are required for replace_spheres and forbidden otherwise"
            )
        if self.mask is not None:
            mask = np.asarray(self.mask).astype(bool)
            mask.flags.writeable = False
            object.__setattr__(self, "mask", mask)
        elif self.mode != "freeze_camera":
            raise InvalidArgumentError(f"{self.mode} requires a mask")
        if self.replacement is not None:
            tracks = tuple(np.asarray(t, dtype=float) for t in self.replacement)
            for k, t in enumerate(tracks):
                if t.ndim != 2 or t.shape[1] != 3:
                    raise InvalidArgumentError(
                        f"replacement track {k} must be (L, 3), got shape {t.shape}"
                    )
                if not np.all(np.isfinite(t)):
                    raise InvalidArgumentError(f"replacement track {k} has non-finite values")
                t.flags.writeable = False
            object.__setattr__(self, "replacement", tracks)


def arc_length_resample(points: np.ndarray, count: int) -> np.ndarray:
    """Resample a polyline to exactly `count` vertices, evenly spaced along
    its arc length. A polyline that already has `count` vertices is
    returned unchanged."""
    pts = np.asarray(points, dtype=float)
    if count < 1:
        raise InvalidArgumentError(f"resample count must be >= 1, got {count}")
    if pts.shape[0] == count:
        return pts.copy()
    if pts.shape[0] == 1:
        return np.repeat(pts, count, axis=0)
    seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    total = cum[-1]
    if total == 0.0:
        return np.repeat(pts[:1], count, axis=0)
    targets = np.linspace(0.0, total, count)
    return np.stack([np.interp(targets, cum, pts[:, d]) for d in range(pts.shape[1])], axis=1)


def lift_trajectory(
    traj: UserTrajectory,
    depth_map: np.ndarray | None,
    scene: MotionScene,
) -> np.ndarray:
    """Turn a drawn path into an (L, 3) world track for a new sphere.

    3D paths are used directly. 2D paths are unprojected with the frame-1
    camera at one constant depth: the depth hint when given, otherwise the
    depth-map value under the path's start pixel.
    """
    count = scene.frame_count
    if not traj.is_2d:
        return arc_length_resample(traj.points, count)

    u0, v0 = traj.points[0]
    if not (0 <= u0 < scene.width and 0 <= v0 < scene.height):
        raise InvalidArgumentError(
            f"trajectory start ({u0}, {v0}) outside the {scene.width}x{scene.height} image"
        )
    if traj.depth_hint is not None:
        depth = float(traj.depth_hint)
    elif depth_map is not None:
        dm = np.asarray(depth_map, dtype=float)
        if dm.shape != (scene.height, scene.width):
            raise InvalidArgumentError(
                f"depth map shape {dm.shape} does not match scene "
                f"{scene.height}x{scene.width}"
            )
        depth = float(dm[math.floor(v0), math.floor(u0)])
    else:
        raise MissingDepthError("2D trajectory needs a depth map or a depth hint")
    if not (math.isfinite(depth) and depth > 0):
        raise InvalidArgumentError(f"lifting depth must be positive, got {depth}")

    frame1 = scene.trajectory.frames[0]
    lifted = np.stack(
        [
            unproject_pixel(frame1.intrinsics, frame1.pose, float(u), float(v), depth)
            for u, v in traj.points
        ]
    )
    return arc_length_resample(lifted, count)


def add_sphere(
    scene: MotionScene, track: np.ndarray, *, sphere_id: int | None = None
) -> tuple[MotionScene, int]:
    """Rebuild the scene with one more sphere track. Depth normalization is
    per clip, so adding a track rescales the clip's relative-depth mapping."""
    track = np.asarray(track, dtype=float)
    if track.shape != (scene.frame_count, 3):
        raise InvalidArgumentError(
            f"track must have shape ({scene.frame_count}, 3), got {track.shape}"
        )
    existing_ids = [s.id for s in scene.spheres]
    if sphere_id is None:
        sphere_id = max(existing_ids, default=-1) + 1
    elif sphere_id in existing_ids:
        raise InvalidArgumentError(f"sphere id {sphere_id} already exists")
    tracks = [s.track for s in scene.spheres] + [track]
    rebuilt = build_scene(
        scene.width,
        scene.height,
        scene.trajectory,
        np.stack(tracks, axis=1),
        scene.envelope,
        scene.render_params,
        sphere_ids=existing_ids + [sphere_id],
    )
    return rebuilt, sphere_id


def remove_sphere(scene: MotionScene, sphere_id: int) -> MotionScene:
    """Rebuild the scene without one sphere (renormalizes like add_sphere)."""
    keep = [s for s in scene.spheres if s.id != sphere_id]
    if len(keep) == len(scene.spheres):
        raise InvalidArgumentError(f"no sphere with id {sphere_id}")
    if not keep:
        return build_scene(
            scene.width, scene.height, scene.trajectory,
            np.empty((scene.frame_count, 0, 3)), scene.envelope, scene.render_params,
        )
    return build_scene(
        scene.width,
        scene.height,
        scene.trajectory,
        np.stack([s.track for s in keep], axis=1),
        scene.envelope,
        scene.render_params,
        sphere_ids=[s.id for s in keep],
    )


def clone_motion(source_scene: MotionScene) -> MotionScene:
    """Motion clone keeps the whole representation; only the reference image
    changes downstream, so this is the identity transform."""
    return source_scene


def fit_similarity(
    source_pts: np.ndarray, target_pts: np.ndarray
) -> tuple[float, np.ndarray]:
    """Least-squares uniform scale + translation (no rotation) mapping
    source pixels onto target pixels. A single pair (or coincident source
    points) fixes the scale at 1."""
    src = np.asarray(source_pts, dtype=float)
    tgt = np.asarray(target_pts, dtype=float)
    if src.shape != tgt.shape or src.ndim != 2 or src.shape[1] != 2 or src.shape[0] < 1:
        raise InvalidArgumentError("similarity fit needs matching (M, 2) point arrays, M >= 1")
    src_mean = src.mean(axis=0)
    tgt_mean = tgt.mean(axis=0)
    dsrc = src - src_mean
    dtgt = tgt - tgt_mean
    var = float(np.sum(dsrc * dsrc))
    scale = float(np.sum(dsrc * dtgt)) / var if var > 0 else 1.0
    return scale, tgt_mean - scale * src_mean


def _nearest_visible_circle(circles, point: tuple[float, float]):
    best = None
    best_dist = math.inf
    for c in circles:
        if not c.visible:
            continue
        d = math.hypot(c.u - point[0], c.v - point[1])
        if d < best_dist:
            best, best_dist = c, d
    return best, best_dist


def transfer_motion(
    source_scene: MotionScene,
    pairs: Sequence[CorrespondencePair],
    target_depth_map: np.ndarray,
    target_dims: tuple[int, int],
) -> MotionScene:
    """Relocate and rescale source sphere motion onto a new reference image.

    Each pair's source pixel selects the nearest source sphere (frame-1
    projected center, 10 px radius). The pairs fix a scale+translation
    map of the image plane; each selected sphere's per-frame projected
    trajectory is transformed by it and lifted back to 3D at the target
    anchor depth, scaled by the sphere's own per-frame depth ratio. The
    result is a fresh scene with the target dimensions and a static camera.
    """
    pairs = list(pairs)
    if not pairs:
        raise InvalidArgumentError("transfer needs at least one correspondence pair")
    width, height = target_dims
    if width < 2 or height < 2:
        raise InvalidArgumentError(f"bad target dimensions {width}x{height}")
    depth = np.asarray(target_depth_map, dtype=float)
    if depth.shape != (height, width):
        raise InvalidArgumentError(
            f"target depth map shape {depth.shape} does not match {width}x{height}"
        )

    first_frame_circles = project_sphere_set(source_scene, 1)
    selected_ids: list[int] = []
    for p in pairs:
        circle, dist = _nearest_visible_circle(first_frame_circles, p.source)
        if circle is None or dist > MATCH_RADIUS_PX:
            raise OutOfFrameError(
                f"no sphere within {MATCH_RADIUS_PX} px of source anchor {p.source}"
            )
        if circle.sphere_id not in selected_ids:
            selected_ids.append(circle.sphere_id)

    scale, shift = fit_similarity(
        np.array([p.source for p in pairs]), np.array([p.target for p in pairs])
    )

    frame_count = source_scene.frame_count
    target_intr = default_intrinsics(width, height)
    identity = CameraPose.identity()
    new_tracks = []
    for sid in selected_ids:
        sphere = source_scene.spheres.by_id(sid)
        us = np.empty(frame_count)
        vs = np.empty(frame_count)
        zs = np.empty(frame_count)
        for l, frame in enumerate(source_scene.trajectory.frames):
            u, v, z = project_track_points(frame.intrinsics, frame.pose, sphere.track[l : l + 1])
            if not z[0] > EPS_Z:
                raise InvalidArgumentError(
                    f"sphere {sid} is behind the source camera at frame {l + 1}; "
                    "its trajectory cannot be transferred"
                )
            us[l], vs[l], zs[l] = u[0], v[0], z[0]
        tu = scale * us + shift[0]
        tv = scale * vs + shift[1]
        i0, j0 = math.floor(tu[0]), math.floor(tv[0])
        if not (0 <= i0 < width and 0 <= j0 < height):
            raise OutOfFrameError(
                f"sphere {sid} start pixel ({tu[0]:.1f}, {tv[0]:.1f}) falls outside "
                f"the {width}x{height} target image"
            )
        z_target = float(depth[j0, i0])
        if not (math.isfinite(z_target) and z_target > 0):
            raise InvalidArgumentError(
                f"target depth at pixel ({i0}, {j0}) must be positive, got {z_target}"
            )
        track = np.stack(
            [
                unproject_pixel(target_intr, identity, tu[l], tv[l], z_target * zs[l] / zs[0])
                for l in range(frame_count)
            ]
        )
        new_tracks.append(track)

    return build_scene(
        width,
        height,
        CameraTrajectory.static(target_intr, frame_count),
        np.stack(new_tracks, axis=1),
        source_scene.envelope,
        default_render_params(width, height),
    )


def _mask_interior_ids(scene: MotionScene, mask: np.ndarray) -> list[int]:
    """Ids of spheres whose frame-1 projected center lies on an interior
    mask pixel (same rule sparsify uses for Set1)."""
    if mask.shape != (scene.height, scene.width):
        raise InvalidArgumentError(
            f"mask shape {mask.shape} does not match scene {scene.height}x{scene.width}"
        )
    ids = []
    for c in project_sphere_set(scene, 1):
        if not c.visible:
            continue
        i, j = math.floor(c.u), math.floor(c.v)
        if 0 <= i < scene.width and 0 <= j < scene.height and mask[j, i]:
            ids.append(c.sphere_id)
    return ids


def _frozen_sphere(sphere: Sphere) -> Sphere:
    return Sphere(
        sphere.id,
        np.repeat(sphere.track[:1], len(sphere), axis=0),
        np.full(len(sphere), float(sphere.normalized_depths[0])),
        sphere.color,
    )


def edit_motion(scene: MotionScene, directives: Sequence[EditDirective]) -> MotionScene:
    """Apply edit directives in order. Untouched spheres and poses are
    preserved exactly (no renormalization); replaced tracks are normalized
    against the scene's stored depth mapping and recolored at their new
    frame-1 centers."""
    for d_idx, directive in enumerate(directives):
        if directive.mode == "freeze_camera":
            scene = scene.with_trajectory(
                CameraTrajectory(
                    tuple(
                        CameraFrame(f.intrinsics, CameraPose.identity())
                        for f in scene.trajectory.frames
                    )
                )
            )
            continue

        interior = _mask_interior_ids(scene, directive.mask)
        if directive.mode == "freeze_spheres":
            interior_set = set(interior)
            spheres = tuple(
                _frozen_sphere(s) if s.id in interior_set else s for s in scene.spheres
            )
            scene = scene.with_spheres(SphereSet(spheres))
            continue

        # replace_spheres
        replacements = directive.replacement
        if len(replacements) > len(interior):
            raise InvalidArgumentError(
                f"directive {d_idx}: {len(replacements)} replacement tracks but only "
                f"{len(interior)} spheres inside the mask"
            )
        frame1 = scene.trajectory.frames[0]
        centers = {
            c.sphere_id: (c.u, c.v) for c in project_sphere_set(scene, 1) if c.visible
        }
        available = [sid for sid in interior if sid in centers]
        assigned: dict[int, np.ndarray] = {}
        for k, track in enumerate(replacements):
            if track.shape[0] != scene.frame_count:
                raise InvalidArgumentError(
                    f"directive {d_idx}: replacement track {k} has {track.shape[0]} frames, "
                    f"scene has {scene.frame_count}"
                )
            u, v, z = project_track_points(frame1.intrinsics, frame1.pose, track[:1])
            if not z[0] > EPS_Z:
                raise InvalidArgumentError(
                    f"directive {d_idx}: replacement track {k} starts behind the camera"
                )
            if not available:
                raise InvalidArgumentError(
                    f"directive {d_idx}: no unmatched mask-interior sphere left for track {k}"
                )
            nearest = min(
                available,
                key=lambda sid: math.hypot(centers[sid][0] - u[0], centers[sid][1] - v[0]),
            )
            available.remove(nearest)
            assigned[nearest] = track

        new_spheres = []
        for s in scene.spheres:
            if s.id not in assigned:
                new_spheres.append(s)
                continue
            track = assigned[s.id]
            u, v, _ = project_track_points(frame1.intrinsics, frame1.pose, track[:1])
            new_spheres.append(
                Sphere(
                    s.id,
                    track,
                    normalize_with_range(track[:, 2], scene.depth_range),
                    color_map_at(float(u[0]), float(v[0]), scene.width, scene.height),
                )
            )
        scene = scene.with_spheres(SphereSet(tuple(new_spheres)))
    return scene
