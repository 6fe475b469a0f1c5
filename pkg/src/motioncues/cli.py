"""Command-line interface.

Every subcommand is deterministic given its inputs and any --seed flag.
Exit code 0 on success; on failure a single machine-readable JSON line
is written to stderr and the exit code is nonzero.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import camera_paths
from .curation import ClipRecord, filter_corpus, ingest_clip, motion_score, sparsify
from .curation import apply_selection
from .errors import FormatError, InvalidArgumentError, MotionCuesError
from .formats.flow import read_flow
from .formats.images import blend_over, read_depth, read_image_rgb, read_mask, save_png
from .formats.poses import read_poses, write_poses
from .formats.scenedoc import load_scene, save_scene
from .manipulation import (
    CorrespondencePair,
    EditDirective,
    UserTrajectory,
    add_sphere,
    edit_motion,
    lift_trajectory,
    transfer_motion,
)
from .render import render_envelope_layer, render_sphere_layer
from .scene import (
    CameraFrame,
    CameraTrajectory,
    RenderParams,
    WorldEnvelope,
    align_to_first_frame,
    default_intrinsics,
)

PORT_ENV_VAR = "MOTIONCUES_PORT"
DEFAULT_PORT = 8722


def _read_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(
            f"not valid JSON: {exc.msg}", path=path, line=exc.lineno, column=exc.colno
        ) from exc
    except OSError as exc:
        raise FormatError(str(exc), path=path) from exc


def _envelope_from_args(args) -> WorldEnvelope | None:
    if args.z_far is None and args.checker_cell is None:
        return None
    z_far = args.z_far if args.z_far is not None else 100.0
    cell = args.checker_cell if args.checker_cell is not None else z_far / 16.0
    return WorldEnvelope(side_length=z_far, checker_cell=cell)


def _render_params_from_args(args) -> RenderParams | None:
    if args.r_min is None and args.r_max is None:
        return None
    if args.r_min is None or args.r_max is None:
        raise InvalidArgumentError("--r-min and --r-max must be given together")
    return RenderParams(args.r_min, args.r_max)


def cmd_curate(args) -> int:
    scene = ingest_clip(
        args.tracks,
        args.poses,
        (args.width, args.height),
        envelope=_envelope_from_args(args),
        render_params=_render_params_from_args(args),
    )
    save_scene(scene, args.output)
    print(json.dumps({"scene": args.output, "frames": scene.frame_count,
                      "spheres": len(scene.spheres)}))
    return 0


def cmd_score(args) -> int:
    paths = []
    for p in args.flows:
        path = Path(p)
        if path.is_dir():
            paths.extend(sorted(path.glob("*.flo")))
        else:
            paths.append(path)
    if not paths:
        raise InvalidArgumentError("no flow files found")
    score = motion_score([read_flow(p) for p in paths])
    print(repr(score))
    return 0


def cmd_filter(args) -> int:
    doc = _read_json(args.manifest)
    if not isinstance(doc, list):
        raise FormatError("score manifest must be a JSON list", path=args.manifest)
    records = []
    for i, entry in enumerate(doc):
        try:
            records.append(
                ClipRecord(
                    clip_id=str(entry["clip_id"]),
                    motion_score=float(entry["motion_score"]),
                    frame_count=int(entry.get("frame_count", 0)),
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(
                f"bad manifest entry {i}: {exc}", path=args.manifest
            ) from exc
    kept = filter_corpus(records, args.percentile)
    lines = "\n".join(r.clip_id for r in kept)
    if args.output:
        Path(args.output).write_text(lines + "\n" if lines else "")
    else:
        print(lines)
    return 0


def cmd_render(args) -> int:
    scene = load_scene(args.scene)
    out = Path(args.output)
    (out / "spheres").mkdir(parents=True, exist_ok=True)
    (out / "envelope").mkdir(parents=True, exist_ok=True)
    reference = None
    if args.reference:
        reference = read_image_rgb(args.reference)
        if reference.shape[:2] != (scene.height, scene.width):
            raise InvalidArgumentError(
                f"reference image is {reference.shape[1]}x{reference.shape[0]}, "
                f"scene is {scene.width}x{scene.height}"
            )
        (out / "composite").mkdir(parents=True, exist_ok=True)

    manifest = {
        "frames": scene.frame_count,
        "width": scene.width,
        "height": scene.height,
        "files": {"spheres": [], "envelope": [], "composite": []},
    }
    for l in range(1, scene.frame_count + 1):
        spheres = render_sphere_layer(scene, l)
        envelope = render_envelope_layer(scene, l)
        sphere_file = f"spheres/frame_{l:04d}.png"
        envelope_file = f"envelope/frame_{l:04d}.png"
        save_png(spheres, out / sphere_file)
        save_png(envelope, out / envelope_file)
        manifest["files"]["spheres"].append(sphere_file)
        manifest["files"]["envelope"].append(envelope_file)
        if reference is not None:
            comp = blend_over(reference, envelope, args.opacity)
            comp = blend_over(comp, spheres, args.opacity, skip_black=True)
            comp_file = f"composite/frame_{l:04d}.png"
            save_png(comp, out / comp_file)
            manifest["files"]["composite"].append(comp_file)
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    print(json.dumps({"output": str(out), "frames": scene.frame_count}))
    return 0


def cmd_camgen(args) -> int:
    spec = camera_paths.CameraMoveSpec(
        kind=args.kind,
        magnitude=args.magnitude,
        frames=args.frames,
        pivot_distance=args.pivot_distance,
    )
    intr = default_intrinsics(args.width, args.height)
    traj = camera_paths.generate(spec, intr)
    if args.compose_kind:
        extra = camera_paths.CameraMoveSpec(
            kind=args.compose_kind,
            magnitude=args.compose_magnitude,
            frames=args.frames,
            pivot_distance=args.pivot_distance,
        )
        traj = camera_paths.compose(traj, camera_paths.generate(extra, intr))
    write_poses([f.pose for f in traj.frames], args.output)
    print(json.dumps({"poses": args.output, "frames": len(traj)}))
    return 0


def cmd_sparsify(args) -> int:
    scene = load_scene(args.scene)
    mask = read_mask(args.mask)
    selection = sparsify(scene, mask, args.seed)
    reduced = apply_selection(scene, selection)
    save_scene(reduced, args.output)
    print(
        json.dumps(
            {
                "sampled": list(selection.sampled_ids),
                "set1": len(selection.set1_ids),
                "set2": len(selection.set2_ids),
                "empty": selection.is_empty,
            }
        )
    )
    return 0


def cmd_lift(args) -> int:
    scene = load_scene(args.scene)
    doc = _read_json(args.trajectory)
    if not isinstance(doc, dict) or "points" not in doc:
        raise FormatError("trajectory file must hold {'points': [...]}", path=args.trajectory)
    traj = UserTrajectory(
        np.asarray(doc["points"], dtype=float), depth_hint=doc.get("depth_hint")
    )
    depth_map = read_depth(args.depth_map) if args.depth_map else None
    track = lift_trajectory(traj, depth_map, scene)
    scene, sphere_id = add_sphere(scene, track)
    save_scene(scene, args.output)
    print(json.dumps({"sphere_id": sphere_id, "scene": args.output}))
    return 0


def cmd_transfer(args) -> int:
    scene = load_scene(args.source)
    doc = _read_json(args.pairs)
    if not isinstance(doc, list) or not doc:
        raise FormatError("pairs file must be a non-empty JSON list", path=args.pairs)
    pairs = []
    for i, entry in enumerate(doc):
        try:
            pairs.append(
                CorrespondencePair(
                    source=tuple(float(v) for v in entry["source"]),
                    target=tuple(float(v) for v in entry["target"]),
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"bad pair {i}: {exc}", path=args.pairs) from exc
    depth_map = read_depth(args.target_depth)
    out_scene = transfer_motion(scene, pairs, depth_map, (args.width, args.height))
    save_scene(out_scene, args.output)
    print(json.dumps({"scene": args.output, "spheres": len(out_scene.spheres)}))
    return 0


def cmd_edit(args) -> int:
    scene = load_scene(args.scene)
    doc = _read_json(args.directives)
    if not isinstance(doc, list):
        raise FormatError("directives file must be a JSON list", path=args.directives)
    directives = []
    for i, entry in enumerate(doc):
        try:
            mode = entry["mode"]
            mask = read_mask(entry["mask"]) if "mask" in entry else None
            replacement = None
            if "replacement" in entry:
                replacement = tuple(
                    np.asarray(t, dtype=float) for t in entry["replacement"]
                )
            directives.append(EditDirective(mode, mask, replacement))
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"bad directive {i}: {exc}", path=args.directives) from exc
    out_scene = edit_motion(scene, directives)
    save_scene(out_scene, args.output)
    print(json.dumps({"scene": args.output, "directives": len(directives)}))
    return 0


def cmd_eval_cam(args) -> int:
    def load(path):
        poses = align_to_first_frame(read_poses(path))
        intr = default_intrinsics(2, 2)  # metrics ignore intrinsics
        return CameraTrajectory(tuple(CameraFrame(intr, p) for p in poses))

    gt = load(args.gt)
    pred = load(args.pred)
    print(f"RotErr {camera_paths.rot_err(gt, pred):.6f}")
    print(f"TransErr {camera_paths.trans_err(gt, pred):.6f}")
    return 0


def cmd_serve(args) -> int:
    from .service import serve

    serve(host=args.host, port=args.port, frontend_dir=args.frontend)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="motioncues",
        description="Build, curate, manipulate and render sphere-and-envelope "
        "motion scenes into two-layer control-signal images.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("curate", help="tracks + poses -> scene document")
    p.add_argument("--tracks", required=True)
    p.add_argument("--poses", required=True)
    p.add_argument("--width", type=int, required=True)
    p.add_argument("--height", type=int, required=True)
    p.add_argument("--z-far", type=float, default=None)
    p.add_argument("--checker-cell", type=float, default=None)
    p.add_argument("--r-min", type=float, default=None)
    p.add_argument("--r-max", type=float, default=None)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_curate)

    p = sub.add_parser("score", help="flow files/dir -> motion score")
    p.add_argument("flows", nargs="+")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("filter", help="score manifest -> kept clip ids")
    p.add_argument("manifest")
    p.add_argument("--percentile", type=float, default=30.0)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_filter)

    p = sub.add_parser("render", help="scene document -> layer images + manifest")
    p.add_argument("scene")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--reference", default=None, help="reference image for composites")
    p.add_argument("--opacity", type=int, default=60)
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("camgen", help="camera move spec -> pose file")
    p.add_argument("kind")
    p.add_argument("magnitude", type=float)
    p.add_argument("--frames", type=int, default=16)
    p.add_argument("--width", type=int, default=768)
    p.add_argument("--height", type=int, default=512)
    p.add_argument("--pivot-distance", type=float, default=camera_paths.DEFAULT_PIVOT_DISTANCE)
    p.add_argument("--compose-kind", default=None)
    p.add_argument("--compose-magnitude", type=float, default=0.0)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_camgen)

    p = sub.add_parser("sparsify", help="scene + mask + seed -> reduced scene")
    p.add_argument("scene")
    p.add_argument("--mask", required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_sparsify)

    p = sub.add_parser("lift", help="drawn trajectory -> scene with a new sphere")
    p.add_argument("scene")
    p.add_argument("--trajectory", required=True)
    p.add_argument("--depth-map", default=None)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_lift)

    p = sub.add_parser("transfer", help="relocate source motion onto a new image")
    p.add_argument("--source", required=True)
    p.add_argument("--pairs", required=True)
    p.add_argument("--target-depth", required=True)
    p.add_argument("--width", type=int, required=True)
    p.add_argument("--height", type=int, required=True)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_transfer)

    p = sub.add_parser("edit", help="apply edit directives to a scene")
    p.add_argument("scene")
    p.add_argument("--directives", required=True)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_edit)

    p = sub.add_parser("eval-cam", help="RotErr/TransErr between two pose files")
    p.add_argument("gt")
    p.add_argument("pred")
    p.set_defaults(func=cmd_eval_cam)

    p = sub.add_parser("serve", help="start the HTTP rendering service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument(
        "--port",
        type=int,
        default=int(os.environ.get(PORT_ENV_VAR, DEFAULT_PORT)),
    )
    p.add_argument("--frontend", default=None, help="static directory to serve at /")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except MotionCuesError as exc:
        line = {"error": exc.code, "message": str(exc)}
        frame_index = getattr(exc, "frame_index", None)
        if frame_index is not None:
            line["frame"] = frame_index
        print(json.dumps(line), file=sys.stderr)
        return 1
    except OSError as exc:
        print(json.dumps({"error": "io-error", "message": str(exc)}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
