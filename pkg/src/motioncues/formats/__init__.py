"""File formats: binary flow and track layouts, pose text files, image
grids, and the JSON scene document."""

from .flow import FLOW_MAGIC, read_flow, write_flow
from .images import (
    blend_over,
    png_bytes,
    read_depth,
    read_image_rgb,
    read_mask,
    save_png,
)
from .poses import read_poses, write_poses
from .scenedoc import (
    SCENE_DOC_VERSION,
    load_scene,
    parse_scene,
    save_scene,
    scene_from_dict,
    scene_to_dict,
    serialize_scene,
)
from .tracks import TRACKS_MAGIC, read_tracks, write_tracks

__all__ = [
    "FLOW_MAGIC",
    "TRACKS_MAGIC",
    "SCENE_DOC_VERSION",
    "read_flow",
    "write_flow",
    "read_tracks",
    "write_tracks",
    "read_poses",
    "write_poses",
    "read_mask",
    "read_depth",
    "read_image_rgb",
    "save_png",
    "png_bytes",
    "blend_over",
    "parse_scene",
    "serialize_scene",
    "scene_from_dict",
    "scene_to_dict",
    "load_scene",
    "save_scene",
]
