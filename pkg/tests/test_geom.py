import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st
from scipy.optimize import linprog

from oracles import homogeneous, rot
from utamp.geom import (
    BBox, FrameMismatch, GimbalLock, Pose, angle_diff, angles_close, compose, invert,
    is_rotation, matrix_to_rpy, obb_contains_point, obb_overlap, poses_close, rpy_to_matrix,
)

angle = st.floats(-math.pi, math.pi, allow_nan=False)
pitch = st.floats(-math.pi / 2 + 1e-3, math.pi / 2 - 1e-3)
coord = st.floats(-2, 2, allow_nan=False)
rpys = st.tuples(angle, pitch, angle)
poses = st.builds(Pose, st.tuples(coord, coord, coord), rpys)
extent = st.floats(0.01, 0.5)


def test_elementary_rotations_match_reference():
    for w in [(0.3, 0, 0), (0, -0.7, 0), (0, 0, 2.5), (0.1, 0.2, 0.3)]:
        assert np.allclose(rpy_to_matrix(w), rot(w), atol=1e-12)


def test_yaw_quarter_turn_maps_x_to_y():
    assert np.allclose(rpy_to_matrix((0, 0, math.pi / 2)) @ [1, 0, 0], [0, 1, 0])


@given(rpys)
def test_rpy_round_trip(w):
    back = matrix_to_rpy(rpy_to_matrix(w))
    assert angles_close(back, w, 1e-9)


@given(rpys)
def test_matrices_are_rotations(w):
    assert is_rotation(rpy_to_matrix(w))


def test_gimbal_lock_raises_without_fallback():
    R = rpy_to_matrix((0.4, math.pi / 2, 0.1))
    with pytest.raises(GimbalLock):
        matrix_to_rpy(R)
    w = matrix_to_rpy(R, fallback=True)
    assert w[0] == 0.0
    assert np.allclose(rpy_to_matrix(w), R, atol=1e-9)


def test_angle_diff_identifies_plus_and_minus_pi():
    assert angle_diff(math.pi, -math.pi) == pytest.approx(0.0, abs=1e-15)
    assert angles_close((math.pi, 0, 0), (-math.pi, 0, 0))
    assert angle_diff(0.1, 2 * math.pi) == pytest.approx(0.1)


@given(poses, poses)
def test_compose_matches_homogeneous_product(a, b):
    got = compose(a, b).matrix()
    want = homogeneous(a.position, a.rpy) @ homogeneous(b.position, b.rpy)
    assert np.allclose(got, want, atol=1e-9)


@given(poses)
def test_inverse_composes_to_identity(p):
    assert poses_close(compose(p, invert(p)), Pose.identity(), 1e-9)
    assert poses_close(compose(invert(p), p), Pose.identity(), 1e-9)


@given(poses, poses, poses)
def test_compose_is_associative(a, b, c):
    assert poses_close(compose(compose(a, b), c), compose(a, compose(b, c)), 1e-9)


def test_frame_labels_are_checked():
    table = Pose((0, 0, 0.4), frame="r", name="table")
    on_table = Pose((0, 0, 0.1), frame="table", name="b1")
    assert compose(table, on_table).frame == "r"
    with pytest.raises(FrameMismatch):
        compose(table, Pose(frame="b2"))


def test_pose_rejects_bad_values():
    with pytest.raises(ValueError):
        Pose((0, 0, float("nan")))
    with pytest.raises(ValueError):
        Pose((0, 0))
    with pytest.raises(ValueError):
        BBox(0.1, 0.0, 0.1)


def test_point_containment_is_closed():
    box = Pose((1, 0, 0), (0, 0, math.pi / 4))
    size = BBox(0.2, 0.2, 0.2)
    assert obb_contains_point(box, size, (1, 0, 0))
    assert obb_contains_point(box, size, (1, 0, 0.1))
    assert not obb_contains_point(box, size, (1, 0, 0.1 + 1e-6))
    # a corner of the unrotated box lies outside once rotated by 45 degrees
    assert not obb_contains_point(box, size, (1.1, 0.1, 0))


def _lp_depth(a, b):
    """Largest t such that some point is at least t inside both boxes (negative if disjoint)."""
    rows, rhs = [], []
    for pose, size in (a, b):
        R = rot(pose.rpy)
        h = np.array(size.as_tuple()) / 2
        for i in range(3):
            n = R[:, i]
            c = float(n @ pose.position)
            rows += [list(n) + [1.0], list(-n) + [1.0]]
            rhs += [c + h[i], -c + h[i]]
    res = linprog([0, 0, 0, -1], A_ub=rows, b_ub=rhs, bounds=[(None, None)] * 3 + [(None, 1)])
    return -res.fun


@settings(max_examples=150, deadline=None)
@given(poses, poses, st.tuples(extent, extent, extent), st.tuples(extent, extent, extent))
def test_overlap_agrees_with_linear_program(pa, pb, sa, sb):
    a = (Pose(np.array(pa.position) * 0.2, pa.rpy), BBox(*sa))
    b = (Pose(np.array(pb.position) * 0.2, pb.rpy), BBox(*sb))
    depth = _lp_depth(a, b)
    assume(abs(depth) > 1e-6)
    assert obb_overlap(a, b) == (depth > 0)
    assert obb_overlap(b, a) == (depth > 0)


def test_touching_faces_pass_with_margin():
    s = BBox(0.05, 0.05, 0.05)
    a = (Pose((0, 0, 0)), s)
    b = (Pose((0, 0, 0.05)), s)
    assert obb_overlap(a, b)
    assert not obb_overlap(a, b, margin=1e-6)
    assert obb_overlap(a, (Pose((0, 0, 0.049)), s), margin=1e-6)
