import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from motioncues import (
    CameraTrajectory,
    ClipRecord,
    FlowField,
    InvalidArgumentError,
    Sphere,
    apply_selection,
    build_scene,
    default_intrinsics,
    filter_corpus,
    motion_score,
    seed_grid,
    sparsify,
    trajectory_length,
)


def _uniform_flow(w, h, u, v):
    vec = np.empty((h, w, 2), dtype=np.float32)
    vec[:, :, 0] = u
    vec[:, :, 1] = v
    return FlowField(width=w, height=h, vectors=vec)


class TestMotionScore:
    def test_uniform_three_four_is_five(self):
        assert motion_score([_uniform_flow(20, 10, 3.0, 4.0)]) == pytest.approx(5.0, abs=1e-9)

    def test_zero_field(self):
        assert motion_score([_uniform_flow(8, 8, 0.0, 0.0)]) == 0.0

    def test_mean_over_fields(self):
        fields = [_uniform_flow(8, 8, 3.0, 4.0), _uniform_flow(8, 8, 0.0, 0.0)]
        assert motion_score(fields) == pytest.approx(2.5, abs=1e-9)

    def test_resolution_invariance(self):
        small = motion_score([_uniform_flow(16, 16, 3.0, 4.0)])
        large = motion_score([_uniform_flow(100, 60, 3.0, 4.0)])
        assert small == pytest.approx(large, abs=1e-6)

    def test_empty_and_mismatched(self):
        with pytest.raises(InvalidArgumentError):
            motion_score([])
        with pytest.raises(InvalidArgumentError):
            motion_score([_uniform_flow(8, 8, 1, 1), _uniform_flow(8, 9, 1, 1)])


class TestFilterCorpus:
    def test_ten_distinct_scores(self):
        records = [ClipRecord(f"c{i}", float(i)) for i in range(1, 11)]
        kept = filter_corpus(records, 30)
        assert [r.motion_score for r in kept] == [3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0]

    def test_all_equal_keeps_all(self):
        records = [ClipRecord(f"c{i}", 2.0) for i in range(7)]
        assert len(filter_corpus(records, 30)) == 7

    def test_single_clip_kept(self):
        assert len(filter_corpus([ClipRecord("only", 0.0)], 30)) == 1

    def test_order_preserved(self):
        scores = [9.0, 1.0, 5.0, 7.0, 3.0, 8.0, 2.0, 6.0, 4.0, 10.0]
        records = [ClipRecord(f"c{s:.0f}", s) for s in scores]
        kept = filter_corpus(records, 30)
        # threshold is the 3rd smallest (3.0); scores 1 and 2 drop, order kept
        assert [r.motion_score for r in kept] == [9.0, 5.0, 7.0, 3.0, 8.0, 6.0, 4.0, 10.0]

    def test_empty_rejected(self):
        with pytest.raises(InvalidArgumentError):
            filter_corpus([], 30)

    @settings(max_examples=60, deadline=None)
    @given(st.lists(st.floats(min_value=0, max_value=1e6), min_size=1, max_size=60))
    def test_removal_bounds(self, scores):
        records = [ClipRecord(f"c{i}", s) for i, s in enumerate(scores)]
        kept = filter_corpus(records, 30)
        removed = len(records) - len(kept)
        assert 0 <= removed <= -(-30 * len(records) // 100)
        if len(set(scores)) == len(scores):
            assert removed == -(-30 * len(records) // 100) - 1


class TestSeedGrid:
    def test_default_grid_count_and_first_point(self):
        pts = seed_grid(768, 512, 25, 25)
        assert len(pts) == 625
        assert pts[0] == pytest.approx((15.36, 10.24), abs=1e-12)

    def test_single_cell(self):
        assert seed_grid(100, 100, 1, 1) == [(50.0, 50.0)]

    def test_two_by_two(self):
        assert seed_grid(100, 100, 2, 2) == [
            (25.0, 25.0),
            (75.0, 25.0),
            (25.0, 75.0),
            (75.0, 75.0),
        ]

    def test_points_strictly_inside(self):
        for rows, cols in [(1, 1), (3, 7), (25, 25)]:
            for u, v in seed_grid(640, 480, rows, cols):
                assert 0 < u < 640 and 0 < v < 480


class TestTrajectoryLength:
    def test_static_track(self):
        s = Sphere(0, np.zeros((5, 3)) + [0, 0, 2.0], np.full(5, 0.5), (1, 2, 3))
        assert trajectory_length(s) == 0.0

    def test_pythagorean(self):
        track = np.array([[0.0, 0.0, 1.0], [3.0, 4.0, 1.0]])
        s = Sphere(0, track, np.array([0.5, 0.5]), (0, 0, 0))
        assert trajectory_length(s) == pytest.approx(5.0, abs=1e-12)

    def test_single_frame(self):
        s = Sphere(0, np.array([[1.0, 2.0, 3.0]]), np.array([0.5]), (0, 0, 0))
        assert trajectory_length(s) == 0.0

    def test_rigid_translation_invariance(self):
        rng = np.random.default_rng(3)
        track = rng.normal(size=(6, 3))
        shifted = track + np.array([10.0, -4.0, 2.0])
        a = Sphere(0, track, np.full(6, 0.5), (0, 0, 0))
        b = Sphere(0, shifted, np.full(6, 0.5), (0, 0, 0))
        assert trajectory_length(a) == pytest.approx(trajectory_length(b), abs=1e-9)

    def test_uniform_scaling(self):
        rng = np.random.default_rng(4)
        track = rng.normal(size=(6, 3))
        a = Sphere(0, track, np.full(6, 0.5), (0, 0, 0))
        b = Sphere(0, 3.0 * track, np.full(6, 0.5), (0, 0, 0))
        assert trajectory_length(b) == pytest.approx(3.0 * trajectory_length(a), rel=1e-12)


def _scene_with_lengths(count=100, frames=4, width=200, height=200):
    """Spheres with distinct trajectory lengths 1..count, on a grid of
    frame-1 positions in front of the camera."""
    traj = CameraTrajectory.static(default_intrinsics(width, height), frames)
    tracks = np.zeros((frames, count, 3))
    for n in range(count):
        base = np.array([(n % 10 - 4.5) * 2.0, (n // 10 - 4.5) * 2.0, 30.0])
        step = (n + 1) / (frames - 1)
        for l in range(frames):
            tracks[l, n] = base + np.array([0.0, 0.0, 0.0])
            tracks[l, n, 0] += step * l
    return build_scene(width, height, traj, tracks)


class TestSparsify:
    def test_set2_top_twenty_of_hundred(self):
        scene = _scene_with_lengths(100)
        mask = np.zeros((200, 200), dtype=bool)
        sel = sparsify(scene, mask, rng_seed=0)
        assert len(sel.set1_ids) == 0
        assert len(sel.set2_ids) == 20
        lengths = {s.id: trajectory_length(s) for s in scene.spheres}
        cutoff = sorted(lengths.values())[79]
        assert all(lengths[sid] > cutoff for sid in sel.set2_ids)

    def test_union_of_two_caps_n(self):
        scene = _scene_with_lengths(2)
        mask = np.zeros((200, 200), dtype=bool)
        seen = set()
        for seed in range(60):
            sel = sparsify(scene, mask, rng_seed=seed)
            if sel.is_empty:
                continue
            seen.add(len(sel.sampled_ids))
            assert set(sel.sampled_ids) <= set(sel.union_ids)
        assert seen <= {1, 2}

    def test_empty_selection_outcome(self):
        traj = CameraTrajectory.static(default_intrinsics(50, 50), 3)
        tracks = np.zeros((3, 4, 3)) + [0, 0, 10.0]
        tracks[:, :, 0] = np.linspace(-2, 2, 4)[None, :]
        scene = build_scene(50, 50, traj, tracks)
        sel = sparsify(scene, np.zeros((50, 50), dtype=bool), rng_seed=1)
        assert sel.is_empty
        assert sel.sampled_ids == ()

    def test_mask_interior_set1(self):
        scene = _scene_with_lengths(100)
        mask = np.zeros((200, 200), dtype=bool)
        mask[:, :100] = True  # left half
        sel = sparsify(scene, mask, rng_seed=3)
        from motioncues import project_sphere_set

        for c in project_sphere_set(scene, 1):
            inside = c.visible and 0 <= int(np.floor(c.u)) < 100
            assert (c.sphere_id in sel.set1_ids) == inside

    def test_seed_determinism(self):
        scene = _scene_with_lengths(40)
        mask = np.zeros((200, 200), dtype=bool)
        mask[80:120, 80:120] = True
        for seed in (0, 7, 12345):
            a = sparsify(scene, mask, rng_seed=seed)
            b = sparsify(scene, mask, rng_seed=seed)
            assert a == b

    def test_sampled_within_bounds(self):
        scene = _scene_with_lengths(60)
        mask = np.ones((200, 200), dtype=bool)
        for seed in range(50):
            sel = sparsify(scene, mask, rng_seed=seed)
            assert 1 <= len(sel.sampled_ids) <= 16
            assert set(sel.sampled_ids) <= set(sel.union_ids)

    def test_mask_shape_mismatch(self):
        scene = _scene_with_lengths(4)
        with pytest.raises(InvalidArgumentError):
            sparsify(scene, np.zeros((10, 10), dtype=bool), rng_seed=0)

    def test_apply_selection_preserves_sphere_values(self):
        scene = _scene_with_lengths(30)
        sel = sparsify(scene, np.ones((200, 200), dtype=bool), rng_seed=9)
        reduced = apply_selection(scene, sel)
        assert {s.id for s in reduced.spheres} == set(sel.sampled_ids)
        for s in reduced.spheres:
            assert s == scene.spheres.by_id(s.id)
        assert reduced.depth_range == scene.depth_range
