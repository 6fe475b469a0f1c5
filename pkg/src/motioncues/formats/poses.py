"""Pose text files: one frame per line.

Two line layouts are accepted, covering what visual-odometry tools
commonly emit:

* 12 floats: row-major world-to-camera [R | t]
* 7 floats: tx ty tz qx qy qz qw, camera-to-world, converted on import

Blank lines and lines starting with '#' are ignored. Values are written
back with full repr precision, so a write/read round trip is exact.
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import Sequence

import numpy as np

from ..errors import FormatError, InvalidPoseError
from ..rotations import quat_to_matrix
from ..scene import CameraPose

QUAT_NORM_TOL = 1e-3


def _pose_from_values(values: list[float], line_no: int, path: str) -> CameraPose:
    if len(values) == 12:
        m = np.array(values).reshape(3, 4)
        try:
            return CameraPose(m[:, :3], m[:, 3])
        except InvalidPoseError as exc:
            raise InvalidPoseError(f"{path}: line {line_no}: {exc}") from exc
    if len(values) == 7:
        tx, ty, tz, qx, qy, qz, qw = values
        norm = math.sqrt(qx * qx + qy * qy + qz * qz + qw * qw)
        if abs(norm - 1.0) > QUAT_NORM_TOL:
            raise InvalidPoseError(
                f"{path}: line {line_no}: quaternion norm {norm:.6f} deviates from 1 "
                f"by more than {QUAT_NORM_TOL}"
            )
        r_c2w = quat_to_matrix(qx / norm, qy / norm, qz / norm, qw / norm)
        rotation = r_c2w.T
        translation = -(r_c2w.T @ np.array([tx, ty, tz]))
        try:
            return CameraPose(rotation, translation)
        except InvalidPoseError as exc:
            raise InvalidPoseError(f"{path}: line {line_no}: {exc}") from exc
    raise FormatError(
        f"pose line must hold 12 or 7 floats, got {len(values)}",
        path=path,
        line=line_no,
    )


def read_poses(path: str | Path) -> list[CameraPose]:
    path = Path(path)
    poses = []
    for line_no, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            values = [float(tok) for tok in line.split()]
        except ValueError as exc:
            raise FormatError(
                f"pose line is not numeric: {exc}", path=str(path), line=line_no
            ) from exc
        poses.append(_pose_from_values(values, line_no, str(path)))
    if not poses:
        raise FormatError("no pose lines found", path=str(path))
    return poses


def write_poses(poses: Sequence[CameraPose], path: str | Path) -> None:
    path = Path(path)
    lines = []
    for pose in poses:
        values = pose.matrix().reshape(-1)
        lines.append(" ".join(repr(float(v)) for v in values))
    path.write_text("\n".join(lines) + "\n")
