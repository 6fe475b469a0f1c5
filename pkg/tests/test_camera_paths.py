import math

import numpy as np
import pytest

from motioncues import (
    CameraMoveSpec,
    InvalidArgumentError,
    compose,
    default_intrinsics,
    generate,
    project_point,
    rot_err,
    trans_err,
)
from motioncues.camera_paths import MOVE_KINDS
from motioncues.rotations import geodesic_angle_deg, rot_y
from motioncues.scene import CameraFrame, CameraPose, CameraTrajectory, WorldEnvelope

INTR = default_intrinsics(768, 512)


class TestGenerate:
    def test_static(self):
        traj = generate(CameraMoveSpec("static", frames=16), INTR)
        assert len(traj) == 16
        for f in traj.frames:
            assert f.pose.is_identity(1e-12)
            assert f.intrinsics == INTR

    def test_pan_left_angles(self):
        traj = generate(CameraMoveSpec("pan_left", magnitude=30.0, frames=4), INTR)
        angles = [geodesic_angle_deg(np.eye(3), f.pose.rotation) for f in traj.frames]
        assert np.allclose(angles, [0, 10, 20, 30], atol=1e-9)
        for f in traj.frames:
            assert np.max(np.abs(f.pose.translation)) == 0.0

    def test_pan_left_moves_content_right(self):
        traj = generate(CameraMoveSpec("pan_left", magnitude=20.0, frames=2), INTR)
        last = traj.frames[-1]
        u, _, _ = project_point(last.intrinsics, last.pose, (0, 0, 10))
        assert u > INTR.cx

    def test_tilt_up_moves_content_down(self):
        traj = generate(CameraMoveSpec("tilt_up", magnitude=20.0, frames=2), INTR)
        last = traj.frames[-1]
        _, v, _ = project_point(last.intrinsics, last.pose, (0, 0, 10))
        assert v > INTR.cy

    def test_zoom_in_log_linear(self):
        traj = generate(CameraMoveSpec("zoom_in", magnitude=2.0, frames=3), INTR)
        fxs = [f.intrinsics.fx for f in traj.frames]
        assert np.allclose(fxs, [768.0, 768.0 * math.sqrt(2), 1536.0], atol=1e-9)
        for f in traj.frames:
            assert f.pose.is_identity(1e-12)

    def test_zoom_out_divides_focal(self):
        traj = generate(CameraMoveSpec("zoom_out", magnitude=2.0, frames=2), INTR)
        assert abs(traj.frames[-1].intrinsics.fx - 384.0) < 1e-9

    def test_dolly_in_translates_forward(self):
        traj = generate(CameraMoveSpec("dolly_in", magnitude=6.0, frames=4), INTR)
        centers = [f.pose.camera_center() for f in traj.frames]
        assert np.allclose(centers[-1], [0, 0, 6.0], atol=1e-12)
        zs = [c[2] for c in centers]
        assert zs == sorted(zs)

    def test_every_kind_starts_at_identity(self):
        for kind in sorted(MOVE_KINDS):
            traj = generate(CameraMoveSpec(kind, magnitude=1.5, frames=5), INTR)
            assert traj.frames[0].pose.is_identity(1e-9)
            assert traj.frames[0].intrinsics == INTR

    def test_orbit_keeps_pivot_at_principal_point(self):
        spec = CameraMoveSpec("orbit_left", magnitude=40.0, frames=8, pivot_distance=10.0)
        traj = generate(spec, INTR)
        pivot = (0.0, 0.0, 10.0)
        for f in traj.frames:
            u, v, _ = project_point(f.intrinsics, f.pose, pivot)
            assert abs(u - INTR.cx) < 0.5
            assert abs(v - INTR.cy) < 0.5

    def test_translational_magnitude_stays_inside_envelope(self):
        half = WorldEnvelope().side_length / 2.0
        for kind in ("dolly_in", "dolly_out", "truck_left", "pedestal_down"):
            traj = generate(CameraMoveSpec(kind, magnitude=half - 1e-6, frames=8), INTR)
            for f in traj.frames:
                assert np.max(np.abs(f.pose.camera_center())) < half

    def test_single_frame(self):
        traj = generate(CameraMoveSpec("pan_right", magnitude=90.0, frames=1), INTR)
        assert len(traj) == 1
        assert traj.frames[0].pose.is_identity(1e-12)

    def test_invalid_specs(self):
        with pytest.raises(InvalidArgumentError):
            CameraMoveSpec("spiral", magnitude=1.0)
        with pytest.raises(InvalidArgumentError):
            CameraMoveSpec("pan_left", magnitude=1.0, frames=0)
        with pytest.raises(InvalidArgumentError):
            CameraMoveSpec("zoom_in", magnitude=0.0)
        with pytest.raises(InvalidArgumentError):
            CameraMoveSpec("pan_left", magnitude=float("nan"))


class TestCompose:
    def test_static_is_identity_element(self):
        x = generate(CameraMoveSpec("pan_left", magnitude=25.0, frames=6), INTR)
        static = generate(CameraMoveSpec("static", frames=6), INTR)
        combined = compose(static, x)
        assert combined == x

    def test_pan_plus_zoom(self):
        pan = generate(CameraMoveSpec("pan_left", magnitude=30.0, frames=4), INTR)
        zoom = generate(CameraMoveSpec("zoom_in", magnitude=2.0, frames=4), INTR)
        combined = compose(pan, zoom)
        for fc, fp, fz in zip(combined.frames, pan.frames, zoom.frames):
            assert np.allclose(fc.pose.rotation, fp.pose.rotation, atol=1e-12)
            assert abs(fc.intrinsics.fx - fz.intrinsics.fx) < 1e-9
            assert abs(fc.intrinsics.fy - fz.intrinsics.fy) < 1e-9

    def test_length_mismatch(self):
        a = generate(CameraMoveSpec("static", frames=4), INTR)
        b = generate(CameraMoveSpec("static", frames=5), INTR)
        with pytest.raises(InvalidArgumentError):
            compose(a, b)

    def test_base_intrinsics_must_match(self):
        a = generate(CameraMoveSpec("static", frames=4), INTR)
        b = generate(CameraMoveSpec("static", frames=4), default_intrinsics(640, 480))
        with pytest.raises(InvalidArgumentError):
            compose(a, b)


def _yaw_trajectory(angle_deg, frames):
    pose = CameraPose(rot_y(math.radians(angle_deg)), np.zeros(3))
    return CameraTrajectory(tuple(CameraFrame(INTR, pose) for _ in range(frames)))


class TestMetrics:
    def test_zero_on_identical(self):
        traj = generate(CameraMoveSpec("orbit_right", magnitude=35.0, frames=9), INTR)
        assert rot_err(traj, traj) == 0.0
        assert trans_err(traj, traj) == 0.0

    def test_single_axis_90_degrees(self):
        gt = _yaw_trajectory(0.0, 5)
        pred = _yaw_trajectory(90.0, 5)
        assert abs(rot_err(gt, pred) - 90.0) < 1e-9

    def test_180_degrees_clamped(self):
        gt = _yaw_trajectory(0.0, 3)
        pred = _yaw_trajectory(180.0, 3)
        assert abs(rot_err(gt, pred) - 180.0) < 1e-6

    def test_both_static_at_origin(self):
        a = generate(CameraMoveSpec("static", frames=4), INTR)
        assert trans_err(a, a) == 0.0

    def test_two_frame_half_distance(self):
        gt = generate(CameraMoveSpec("dolly_in", magnitude=1.0, frames=2), INTR)
        pred = generate(CameraMoveSpec("static", frames=2), INTR)
        assert abs(trans_err(gt, pred) - 0.5) < 1e-12

    def test_symmetry_and_nonnegativity(self):
        rng = np.random.default_rng(17)
        a = generate(CameraMoveSpec("orbit_left", magnitude=30.0, frames=6), INTR)
        b = generate(CameraMoveSpec("dolly_out", magnitude=3.0, frames=6), INTR)
        assert rot_err(a, b) == pytest.approx(rot_err(b, a), abs=1e-12)
        assert trans_err(a, b) == pytest.approx(trans_err(b, a), abs=1e-12)
        assert rot_err(a, b) >= 0 and trans_err(a, b) >= 0

    def test_length_mismatch(self):
        a = generate(CameraMoveSpec("static", frames=3), INTR)
        b = generate(CameraMoveSpec("static", frames=4), INTR)
        with pytest.raises(InvalidArgumentError):
            rot_err(a, b)
        with pytest.raises(InvalidArgumentError):
            trans_err(a, b)
