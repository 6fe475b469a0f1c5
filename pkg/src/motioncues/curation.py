"""Clip curation: motion scoring/filtering and dense-to-sparse selection."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InvalidArgumentError
from .projection import project_sphere_set
from .scene import MotionScene, Sphere

SPARSIFY_MAX_SAMPLES = 16
SET2_PERCENTILE = 80.0


@dataclass(frozen=True, eq=False)
class FlowField:
    """Dense per-pixel displacement field, pixels. vectors is (H, W, 2)."""

    width: int
    height: int
    vectors: np.ndarray

    def __post_init__(self):
        vec = np.asarray(self.vectors, dtype=np.float32)
        if vec.shape != (self.height, self.width, 2):
            raise InvalidArgumentError(
                f"flow vectors must have shape ({self.height}, {self.width}, 2), got {vec.shape}"
            )
        if not np.all(np.isfinite(vec)):
            raise InvalidArgumentError("flow field contains non-finite values")
        vec.flags.writeable = False
        object.__setattr__(self, "vectors", vec)

    def __eq__(self, other):
        if not isinstance(other, FlowField):
            return NotImplemented
        return (
            self.width == other.width
            and self.height == other.height
            and np.array_equal(self.vectors, other.vectors)
        )


@dataclass(frozen=True)
class ClipRecord:
    clip_id: str
    motion_score: float
    frame_count: int = 0

    def __post_init__(self):
        if not (math.isfinite(self.motion_score) and self.motion_score >= 0):
            raise InvalidArgumentError(
                f"motion score must be >= 0, got {self.motion_score} for {self.clip_id!r}"
            )


@dataclass(frozen=True)
class SparsifySelection:
    """Outcome of dense-to-sparse selection. Empty sampled_ids means the
    mask/length union itself was empty (a distinguishable outcome, not an
    error)."""

    set1_ids: tuple[int, ...]
    set2_ids: tuple[int, ...]
    sampled_ids: tuple[int, ...]

    @property
    def union_ids(self) -> tuple[int, ...]:
        return tuple(sorted(set(self.set1_ids) | set(self.set2_ids)))

    @property
    def is_empty(self) -> bool:
        return not self.sampled_ids


def motion_score(flows: Sequence[FlowField]) -> float:
    """Clip motion score: Frobenius norm of each field's (u, v) tensor,
    normalized by sqrt(W*H) so it is resolution independent, averaged
    over fields."""
    flows = list(flows)
    if not flows:
        raise InvalidArgumentError("motion score needs at least one flow field")
    w, h = flows[0].width, flows[0].height
    scores = []
    for f in flows:
        if (f.width, f.height) != (w, h):
            raise InvalidArgumentError(
                f"flow field dimensions differ: {f.width}x{f.height} vs {w}x{h}"
            )
        frob = float(np.linalg.norm(f.vectors.astype(np.float64)))
        scores.append(frob / math.sqrt(w * h))
    return float(np.mean(scores))


def nearest_rank(values: Sequence[float], percentile: float) -> float:
    """Nearest-rank percentile: the ceil(p/100 * M)-th smallest value."""
    vals = sorted(values)
    if not vals:
        raise InvalidArgumentError("percentile of an empty sample")
    if not 0 < percentile <= 100:
        raise InvalidArgumentError(f"percentile must be in (0, 100], got {percentile}")
    k = math.ceil(percentile / 100.0 * len(vals))
    return vals[k - 1]


def filter_corpus(records: Sequence[ClipRecord], percentile: float = 30.0) -> list[ClipRecord]:
    """Drop clips whose motion score is strictly below the nearest-rank
    percentile threshold; input order is preserved."""
    records = list(records)
    if not records:
        raise InvalidArgumentError("cannot filter an empty corpus")
    threshold = nearest_rank([r.motion_score for r in records], percentile)
    return [r for r in records if not r.motion_score < threshold]


def seed_grid(
    width: int, height: int, rows: int = 25, cols: int = 25
) -> list[tuple[float, float]]:
    """Cell centers of a uniform rows x cols grid over the image, row-major."""
    if rows < 1 or cols < 1:
        raise InvalidArgumentError(f"grid must be at least 1x1, got {rows}x{cols}")
    if width <= 0 or height <= 0:
        raise InvalidArgumentError(f"bad image size {width}x{height}")
    return [
        (width * (c + 0.5) / cols, height * (r + 0.5) / rows)
        for r in range(rows)
        for c in range(cols)
    ]


def trajectory_length(sphere: Sphere) -> float:
    """Total 3D path length of the sphere's track across the clip."""
    if len(sphere) < 2:
        return 0.0
    return float(np.sum(np.linalg.norm(np.diff(sphere.track, axis=0), axis=1)))


def sparsify(scene: MotionScene, salient_mask: np.ndarray, rng_seed: int) -> SparsifySelection:
    """Dense-to-sparse sphere selection.

    Set1: spheres whose frame-1 projected center falls on a mask-interior
    pixel. Set2: spheres with 3D trajectory length strictly above the
    nearest-rank 80th percentile. From the union, N ~ uniform{1..min(16,
    |union|)} spheres are sampled without replacement; the whole procedure
    is deterministic for a fixed seed.
    """
    mask = np.asarray(salient_mask)
    if mask.shape != (scene.height, scene.width):
        raise InvalidArgumentError(
            f"mask shape {mask.shape} does not match scene {scene.height}x{scene.width}"
        )
    mask = mask.astype(bool)

    set1: list[int] = []
    if len(scene.spheres):
        for c in project_sphere_set(scene, 1):
            if not c.visible:
                continue
            i, j = math.floor(c.u), math.floor(c.v)
            if 0 <= i < scene.width and 0 <= j < scene.height and mask[j, i]:
                set1.append(c.sphere_id)

    set2: list[int] = []
    if len(scene.spheres):
        lengths = {s.id: trajectory_length(s) for s in scene.spheres}
        threshold = nearest_rank(list(lengths.values()), SET2_PERCENTILE)
        set2 = [sid for sid, length in lengths.items() if length > threshold]

    union = sorted(set(set1) | set(set2))
    if not union:
        return SparsifySelection(tuple(set1), tuple(set2), ())

    rng = random.Random(rng_seed)
    n = rng.randint(1, min(SPARSIFY_MAX_SAMPLES, len(union)))
    sampled = tuple(sorted(rng.sample(union, n)))
    return SparsifySelection(tuple(set1), tuple(set2), sampled)


def apply_selection(scene: MotionScene, selection: SparsifySelection) -> MotionScene:
    """Reduce a scene to the sampled spheres, keeping their depths and
    colors exactly (the clip, and so its depth mapping, is unchanged)."""
    keep = set(selection.sampled_ids)
    spheres = tuple(s for s in scene.spheres if s.id in keep)
    return scene.with_spheres(type(scene.spheres)(spheres))


def ingest_clip(
    tracks_path,
    poses_path,
    dims: tuple[int, int],
    *,
    envelope=None,
    render_params=None,
) -> MotionScene:
    """Build a scene from estimator output files: world-coordinate tracks
    plus per-frame camera poses, aligned so frame 1 is the identity."""
    from .formats.poses import read_poses
    from .formats.tracks import read_tracks
    from .scene import (
        CameraFrame,
        CameraTrajectory,
        align_to_first_frame,
        build_scene,
        default_intrinsics,
    )

    width, height = dims
    tracks = read_tracks(tracks_path)
    poses = align_to_first_frame(read_poses(poses_path))
    if tracks.shape[0] != len(poses):
        raise InvalidArgumentError(
            f"track file has {tracks.shape[0]} frames but pose file has {len(poses)}"
        )
    intrinsics = default_intrinsics(width, height)
    trajectory = CameraTrajectory(tuple(CameraFrame(intrinsics, p) for p in poses))
    return build_scene(
        width, height, trajectory, tracks, envelope=envelope, render_params=render_params
    )
