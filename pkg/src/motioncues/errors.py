"""Exception hierarchy shared by the whole package.

Error conditions that are values (behind-camera projections, empty
sparsify selections) are NOT exceptions; only genuine failures are.
"""

from __future__ import annotations


class MotionCuesError(Exception):
    """Base class for all errors raised by this package."""

    code = "error"


class InvalidArgumentError(MotionCuesError, ValueError):
    """A precondition on an operation's arguments was violated."""

    code = "invalid-argument"


class InvalidPoseError(InvalidArgumentError):
    """A rotation matrix is not orthonormal (or has negative determinant)."""

    code = "invalid-pose"


class CameraEscapedEnvelopeError(MotionCuesError):
    """The camera center left the world envelope; rendering is undefined."""

    code = "camera-escaped-envelope"

    def __init__(self, message: str, frame_index: int | None = None):
        super().__init__(message)
        self.frame_index = frame_index


class MissingDepthError(MotionCuesError):
    """A 2D trajectory was supplied without any depth source."""

    code = "missing-depth"


class OutOfFrameError(MotionCuesError):
    """A pixel anchor fell outside the image, or no sphere matched it."""

    code = "out-of-frame"


class FormatError(MotionCuesError):
    """A file could not be parsed. Carries a location when known."""

    code = "parse-error"

    def __init__(
        self,
        message: str,
        *,
        path: str | None = None,
        byte_offset: int | None = None,
        line: int | None = None,
        column: int | None = None,
    ):
        loc = []
        if path is not None:
            loc.append(str(path))
        if line is not None:
            loc.append(f"line {line}" + (f", column {column}" if column is not None else ""))
        if byte_offset is not None:
            loc.append(f"byte {byte_offset}")
        if loc:
            message = f"{message} ({': '.join([loc[0]] + loc[1:]) if path else '; '.join(loc)})"
        super().__init__(message)
        self.path = path
        self.byte_offset = byte_offset
        self.line = line
        self.column = column


class UnsupportedVersionError(FormatError):
    """A scene document declares a format version this build does not know."""

    code = "version-unsupported"


class SemanticError(FormatError):
    """A document parsed but violates a type invariant. Carries a field path."""

    code = "semantic-error"

    def __init__(self, message: str, *, field: str | None = None, path: str | None = None):
        if field is not None:
            message = f"{message} [field: {field}]"
        super().__init__(message, path=path)
        self.field = field
