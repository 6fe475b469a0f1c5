"""motioncues: build, manipulate and render sphere-and-envelope motion
scenes into spatially aligned two-layer control-signal images."""

from .camera_paths import CameraMoveSpec, compose, generate, rot_err, trans_err
from .curation import (
    ClipRecord,
    FlowField,
    SparsifySelection,
    apply_selection,
    filter_corpus,
    ingest_clip,
    motion_score,
    seed_grid,
    sparsify,
    trajectory_length,
)
from .errors import (
    CameraEscapedEnvelopeError,
    FormatError,
    InvalidArgumentError,
    InvalidPoseError,
    MissingDepthError,
    MotionCuesError,
    OutOfFrameError,
    SemanticError,
    UnsupportedVersionError,
)
from .manipulation import (
    CorrespondencePair,
    EditDirective,
    UserTrajectory,
    add_sphere,
    arc_length_resample,
    clone_motion,
    edit_motion,
    lift_trajectory,
    remove_sphere,
    transfer_motion,
)
from .oracle import oracle_render
from .projection import (
    ProjectedCircle,
    project_point,
    project_sphere_set,
    unproject_pixel,
)
from .render import (
    ControlSignalFrame,
    render_envelope_layer,
    render_frame,
    render_scene,
    render_sphere_layer,
)
from .scene import (
    CameraFrame,
    CameraIntrinsics,
    CameraPose,
    CameraTrajectory,
    MotionScene,
    RenderParams,
    Sphere,
    SphereSet,
    WorldEnvelope,
    align_to_first_frame,
    assign_colors,
    build_scene,
    default_intrinsics,
    default_render_params,
    normalize_depths,
)

__version__ = "0.1.0"
