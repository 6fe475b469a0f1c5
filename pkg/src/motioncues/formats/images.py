"""Image grids: RGB layers, binary masks, depth maps, and the inspection
composite. PNG encoding goes through one code path so the CLI and the
service emit byte-identical files for the same pixels."""

from __future__ import annotations

import io
import json
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from ..errors import FormatError, InvalidArgumentError

MASK_INTERIOR_THRESHOLD = 127  # values strictly above are interior

_IMAGE_SUFFIXES = {".png", ".tif", ".tiff", ".bmp", ".jpg", ".jpeg"}


def _require_rgb(image: np.ndarray) -> np.ndarray:
    arr = np.asarray(image)
    if arr.ndim != 3 or arr.shape[2] != 3 or arr.dtype != np.uint8:
        raise InvalidArgumentError(
            f"expected an (H, W, 3) uint8 image, got shape {arr.shape} dtype {arr.dtype}"
        )
    return arr


def png_bytes(image: np.ndarray) -> bytes:
    buf = io.BytesIO()
    Image.fromarray(_require_rgb(image), mode="RGB").save(buf, format="PNG")
    return buf.getvalue()


def save_png(image: np.ndarray, path: str | Path) -> None:
    Path(path).write_bytes(png_bytes(image))


def read_image_rgb(path: str | Path) -> np.ndarray:
    path = Path(path)
    try:
        with Image.open(path) as img:
            return np.asarray(img.convert("RGB"))
    except (UnidentifiedImageError, OSError) as exc:
        raise FormatError(f"cannot read image: {exc}", path=str(path)) from exc


def read_mask(path: str | Path) -> np.ndarray:
    """8-bit grayscale mask; pixels above 127 are interior. Returns bool (H, W)."""
    path = Path(path)
    try:
        with Image.open(path) as img:
            gray = np.asarray(img.convert("L"))
    except (UnidentifiedImageError, OSError) as exc:
        raise FormatError(f"cannot read mask image: {exc}", path=str(path)) from exc
    return gray > MASK_INTERIOR_THRESHOLD


def read_depth(path: str | Path) -> np.ndarray:
    """Metric depth grid in world units.

    Image files hold 16-bit grayscale values scaled by a JSON sidecar
    (`<file>.json` with "millimeters_per_unit"); world units are meters,
    so depth = value * millimeters_per_unit / 1000. Any other file is
    parsed as a whitespace-separated float text grid already in world
    units.
    """
    path = Path(path)
    if path.suffix.lower() in _IMAGE_SUFFIXES:
        sidecar = path.with_name(path.name + ".json")
        if not sidecar.exists():
            raise FormatError(
                f"depth image needs a sidecar {sidecar.name} with millimeters_per_unit",
                path=str(path),
            )
        try:
            meta = json.loads(sidecar.read_text())
            mm_per_unit = float(meta["millimeters_per_unit"])
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise FormatError(
                f"bad depth sidecar: {exc}", path=str(sidecar)
            ) from exc
        try:
            with Image.open(path) as img:
                if img.mode not in ("I", "I;16", "L"):
                    img = img.convert("I")
                arr = np.asarray(img, dtype=np.float64)
        except (UnidentifiedImageError, OSError) as exc:
            raise FormatError(f"cannot read depth image: {exc}", path=str(path)) from exc
        return arr * (mm_per_unit / 1000.0)

    rows = []
    for line_no, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            rows.append([float(tok) for tok in line.split()])
        except ValueError as exc:
            raise FormatError(
                f"depth grid line is not numeric: {exc}", path=str(path), line=line_no
            ) from exc
    if not rows:
        raise FormatError("depth grid is empty", path=str(path))
    width = len(rows[0])
    for i, row in enumerate(rows):
        if len(row) != width:
            raise FormatError(
                f"depth grid row has {len(row)} values, expected {width}",
                path=str(path),
                line=i + 1,
            )
    return np.array(rows, dtype=float)


def blend_over(
    reference: np.ndarray,
    layer: np.ndarray,
    opacity_percent: int,
    *,
    skip_black: bool = False,
) -> np.ndarray:
    """Inspection composite: layer alpha-blended over the reference with
    integer arithmetic (half-up), so output is exactly reproducible.
    skip_black leaves the reference untouched where the layer is pure
    black (used for the sphere layer, whose background carries no signal)."""
    ref = _require_rgb(reference)
    lay = _require_rgb(layer)
    if ref.shape != lay.shape:
        raise InvalidArgumentError(f"shape mismatch: {ref.shape} vs {lay.shape}")
    if not 0 <= opacity_percent <= 100:
        raise InvalidArgumentError(f"opacity must be 0..100, got {opacity_percent}")
    ref32 = ref.astype(np.int64)
    lay32 = lay.astype(np.int64)
    out = (ref32 * (100 - opacity_percent) + lay32 * opacity_percent + 50) // 100
    out = out.astype(np.uint8)
    if skip_black:
        black = np.all(lay == 0, axis=2)
        out[black] = ref[black]
    return out
