"""Shared test utilities: deterministic random scenes and poses."""

from __future__ import annotations

import numpy as np

from motioncues import (
    CameraFrame,
    CameraIntrinsics,
    CameraPose,
    CameraTrajectory,
    MotionScene,
    RenderParams,
    WorldEnvelope,
    build_scene,
    default_intrinsics,
)


def random_rotation(rng: np.random.Generator) -> np.ndarray:
    """Uniform-ish random rotation from a normalized random quaternion."""
    q = rng.normal(size=4)
    q /= np.linalg.norm(q)
    x, y, z, w = q
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)],
            [2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)],
            [2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)],
        ]
    )


def random_pose_inside(rng: np.random.Generator, half_side: float) -> CameraPose:
    """Random orientation with the camera center strictly inside the cube."""
    r = random_rotation(rng)
    center = rng.uniform(-0.8, 0.8, size=3) * half_side
    return CameraPose(r, -(r @ center))


def random_scene(
    rng: np.random.Generator,
    max_size: int = 64,
    max_spheres: int = 10,
    max_frames: int = 8,
) -> MotionScene:
    width = int(rng.integers(8, max_size + 1))
    height = int(rng.integers(8, max_size + 1))
    frames = int(rng.integers(1, max_frames + 1))
    n_spheres = int(rng.integers(0, max_spheres + 1))

    envelope = WorldEnvelope()
    half = envelope.side_length / 2.0
    intrinsics = default_intrinsics(width, height)
    traj = CameraTrajectory(
        tuple(CameraFrame(intrinsics, random_pose_inside(rng, half)) for _ in range(frames))
    )
    # Tracks spread around the cameras: some land behind, exercising culling.
    tracks = rng.uniform(-30.0, 30.0, size=(frames, n_spheres, 3))
    render_params = RenderParams(
        r_min=float(rng.uniform(0.5, 3.0)), r_max=float(rng.uniform(4.0, 12.0))
    )
    return build_scene(width, height, traj, tracks, envelope, render_params)
