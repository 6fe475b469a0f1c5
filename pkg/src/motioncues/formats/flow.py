"""Binary dense-flow files (the standard interchange layout).

Little endian: float32 magic 202021.25, int32 width, int32 height, then
height*width interleaved float32 (u, v) pairs, row-major.
"""

from __future__ import annotations

import struct
import warnings
from pathlib import Path

import numpy as np

from ..curation import FlowField
from ..errors import FormatError

FLOW_MAGIC = 202021.25
_HEADER = struct.Struct("<fii")


def read_flow(path: str | Path, on_trailing: str = "reject") -> FlowField:
    """Parse a flow file. Trailing bytes beyond the declared payload are
    rejected by default; pass on_trailing='warn' to tolerate them."""
    if on_trailing not in ("reject", "warn"):
        raise ValueError(f"on_trailing must be 'reject' or 'warn', got {on_trailing!r}")
    path = Path(path)
    data = path.read_bytes()
    if len(data) < _HEADER.size:
        raise FormatError(
            f"flow header needs {_HEADER.size} bytes, file has {len(data)}",
            path=str(path),
            byte_offset=len(data),
        )
    magic, width, height = _HEADER.unpack_from(data)
    if np.float32(magic) != np.float32(FLOW_MAGIC):
        raise FormatError(
            f"bad flow magic {magic!r}, expected {FLOW_MAGIC}",
            path=str(path),
            byte_offset=0,
        )
    if width <= 0 or height <= 0:
        raise FormatError(
            f"flow declares non-positive dimensions {width}x{height}",
            path=str(path),
            byte_offset=4,
        )
    expected = _HEADER.size + width * height * 2 * 4
    if len(data) < expected:
        raise FormatError(
            f"flow truncated: header promises {expected} bytes, file has {len(data)}",
            path=str(path),
            byte_offset=len(data),
        )
    if len(data) > expected:
        msg = f"flow file has {len(data) - expected} trailing bytes"
        if on_trailing == "reject":
            raise FormatError(msg, path=str(path), byte_offset=expected)
        warnings.warn(f"{path}: {msg}", stacklevel=2)
    vectors = np.frombuffer(
        data, dtype="<f4", count=width * height * 2, offset=_HEADER.size
    ).reshape(height, width, 2)
    finite = np.isfinite(vectors).ravel()
    if not finite.all():
        bad = int(np.argmin(finite))
        raise FormatError(
            "flow contains a non-finite value",
            path=str(path),
            byte_offset=_HEADER.size + bad * 4,
        )
    return FlowField(width=width, height=height, vectors=vectors)


def write_flow(field: FlowField, path: str | Path) -> None:
    path = Path(path)
    payload = np.ascontiguousarray(field.vectors, dtype="<f4")
    with path.open("wb") as fh:
        fh.write(_HEADER.pack(FLOW_MAGIC, field.width, field.height))
        fh.write(payload.tobytes())
