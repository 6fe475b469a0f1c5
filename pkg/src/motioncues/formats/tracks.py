"""Binary 3D track files.

Little endian: magic "TRK1", uint32 frame count L, uint32 point count N,
then L*N*3 float32 world coordinates, frame-major (all points of frame 1,
then frame 2, ...).
"""

from __future__ import annotations

import struct
import warnings
from pathlib import Path

import numpy as np

from ..errors import FormatError

TRACKS_MAGIC = b"TRK1"
_HEADER = struct.Struct("<4sII")


def read_tracks(path: str | Path, on_trailing: str = "reject") -> np.ndarray:
    """Parse a track file into an (L, N, 3) float array."""
    if on_trailing not in ("reject", "warn"):
        raise ValueError(f"on_trailing must be 'reject' or 'warn', got {on_trailing!r}")
    path = Path(path)
    data = path.read_bytes()
    if len(data) < _HEADER.size:
        raise FormatError(
            f"track header needs {_HEADER.size} bytes, file has {len(data)}",
            path=str(path),
            byte_offset=len(data),
        )
    magic, frames, points = _HEADER.unpack_from(data)
    if magic != TRACKS_MAGIC:
        raise FormatError(
            f"bad track magic {magic!r}, expected {TRACKS_MAGIC!r}",
            path=str(path),
            byte_offset=0,
        )
    if frames < 1:
        raise FormatError(
            "track file declares zero frames", path=str(path), byte_offset=4
        )
    expected = _HEADER.size + frames * points * 3 * 4
    if len(data) < expected:
        raise FormatError(
            f"tracks truncated: header promises {expected} bytes, file has {len(data)}",
            path=str(path),
            byte_offset=len(data),
        )
    if len(data) > expected:
        msg = f"track file has {len(data) - expected} trailing bytes"
        if on_trailing == "reject":
            raise FormatError(msg, path=str(path), byte_offset=expected)
        warnings.warn(f"{path}: {msg}", stacklevel=2)
    values = np.frombuffer(
        data, dtype="<f4", count=frames * points * 3, offset=_HEADER.size
    )
    finite = np.isfinite(values)
    if not finite.all():
        bad = int(np.argmin(finite))
        raise FormatError(
            "tracks contain a non-finite value",
            path=str(path),
            byte_offset=_HEADER.size + bad * 4,
        )
    return values.reshape(frames, points, 3).astype(float)


def write_tracks(tracks: np.ndarray, path: str | Path) -> None:
    tracks = np.asarray(tracks)
    if tracks.ndim != 3 or tracks.shape[2] != 3:
        raise ValueError(f"tracks must be (L, N, 3), got shape {tracks.shape}")
    path = Path(path)
    with path.open("wb") as fh:
        fh.write(_HEADER.pack(TRACKS_MAGIC, tracks.shape[0], tracks.shape[1]))
        fh.write(np.ascontiguousarray(tracks, dtype="<f4").tobytes())
