import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import deviation_oracle, euler_matrix_oracle, exp_oracle, log_oracle, random_rotation
from tcbirrt import se3

angle = st.floats(-math.pi, math.pi, allow_nan=False)
pitch = st.floats(-1.5, 1.5, allow_nan=False)
coord = st.floats(-5, 5, allow_nan=False)


def test_identity_deviation_is_exact_zero():
    assert np.array_equal(se3.transform_to_deviation(np.eye(4)), np.zeros(6))


def test_deviation_of_translated_quarter_turn():
    T = se3.make_transform(se3.rotz(math.pi / 2), (1, 2, 3))
    np.testing.assert_allclose(se3.transform_to_deviation(T), [1, 2, 3, 0, 0, math.pi / 2], atol=1e-15)


def test_deviation_matches_entrywise_oracle():
    rng = np.random.default_rng(11)
    for _ in range(100):
        T = se3.make_transform(random_rotation(rng), rng.normal(size=3))
        np.testing.assert_allclose(se3.transform_to_deviation(T), deviation_oracle(T), atol=1e-15, rtol=0)


def test_deviation_at_gimbal_lock_is_finite():
    T = se3.make_transform(se3.roty(math.pi / 2))
    xi = se3.transform_to_deviation(T)
    assert np.all(np.isfinite(xi))
    assert xi[4] == pytest.approx(math.pi / 2)


def test_pose_to_transform_examples():
    assert np.array_equal(se3.pose_to_transform(np.zeros(6)), np.eye(4))
    np.testing.assert_allclose(se3.pose_to_transform([0, 0, 0, 0, 0, math.pi / 2])[:3, :3],
                               se3.rotz(math.pi / 2), atol=1e-15)


@given(st.tuples(coord, coord, coord, angle, pitch, angle))
def test_pose_round_trip(xi):
    back = se3.transform_to_deviation(se3.pose_to_transform(xi))
    np.testing.assert_allclose(back, xi, atol=1e-9, rtol=0)


@given(angle, pitch, angle)
def test_euler_matches_extrinsic_xyz(r, p, y):
    np.testing.assert_allclose(se3.euler_to_rotation([r, p, y]), euler_matrix_oracle(r, p, y), atol=1e-14)


def test_expcoords_examples():
    assert np.array_equal(se3.rotation_to_expcoords(np.eye(3)), np.zeros(3))
    np.testing.assert_allclose(se3.rotation_to_expcoords(se3.rotx(math.pi)), [math.pi, 0, 0], atol=1e-15)
    np.testing.assert_allclose(se3.rotation_to_expcoords(se3.rotz(math.pi / 2)), [0, 0, math.pi / 2],
                               atol=1e-15)
    assert np.array_equal(se3.expcoords_to_rotation(np.zeros(3)), np.eye(3))
    np.testing.assert_allclose(se3.expcoords_to_rotation([0, 0, math.pi / 2]), se3.rotz(math.pi / 2),
                               atol=1e-15)


@pytest.mark.parametrize("axis", [(0, 1, 0), (0, 0, 1), (0, 1, 1), (-1, 1, 0), (1, -2, 3)])
def test_half_turn_axis_including_degenerate_first_column(axis):
    # axes with w_x = 0 make 1 + r11 = 0, where the first-column formula divides by zero
    w = np.array(axis, dtype=float)
    w /= np.linalg.norm(w)
    R = exp_oracle(w * math.pi)
    phi = se3.rotation_to_expcoords(R)
    assert np.linalg.norm(phi) == pytest.approx(math.pi, abs=1e-12)
    assert abs(abs(phi @ w) - math.pi) < 1e-9
    np.testing.assert_allclose(se3.expcoords_to_rotation(phi), R, atol=1e-12)


@given(st.tuples(st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1)), st.floats(0, math.pi - 1e-3))
def test_exp_matches_matrix_exponential(direction, theta):
    v = np.array(direction)
    if np.linalg.norm(v) < 1e-3:
        v = np.array([0.0, 0.0, 1.0])
    phi = v / np.linalg.norm(v) * theta
    R = se3.expcoords_to_rotation(phi)
    np.testing.assert_allclose(R, exp_oracle(phi), atol=1e-12)
    assert np.linalg.norm(R.T @ R - np.eye(3)) <= 1e-9
    assert np.linalg.det(R) == pytest.approx(1.0, abs=1e-9)


@given(st.tuples(st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1)), st.floats(0, math.pi - 1e-6))
def test_log_matches_scipy_away_from_half_turn(direction, theta):
    v = np.array(direction)
    if np.linalg.norm(v) < 1e-3:
        v = np.array([1.0, 0.0, 0.0])
    R = exp_oracle(v / np.linalg.norm(v) * theta)
    phi = se3.rotation_to_expcoords(R)
    np.testing.assert_allclose(phi, log_oracle(R), atol=1e-8)
    assert np.linalg.norm(phi) <= math.pi + 1e-12


def test_near_half_turn_round_trip():
    rng = np.random.default_rng(5)
    for _ in range(200):
        w = rng.normal(size=3)
        w /= np.linalg.norm(w)
        theta = math.pi - rng.uniform(0, 1e-3)
        R = exp_oracle(w * theta)
        back = se3.expcoords_to_rotation(se3.rotation_to_expcoords(R))
        assert np.linalg.norm(back - R) <= 1e-9


def test_compose_and_inverse():
    rng = np.random.default_rng(2)
    T = se3.make_transform(random_rotation(rng), rng.normal(size=3))
    assert np.array_equal(se3.compose(np.eye(4), T), T)
    np.testing.assert_allclose(se3.compose(T, se3.inverse(T)), np.eye(4), atol=1e-12)
    np.testing.assert_array_equal(se3.inverse(se3.translation(1, 0, 0)), se3.translation(-1, 0, 0))
    for _ in range(100):
        A = se3.make_transform(random_rotation(rng), rng.normal(size=3))
        B = se3.make_transform(random_rotation(rng), rng.normal(size=3))
        np.testing.assert_allclose(se3.compose(A, B), np.dot(A, B), atol=1e-15)
        C = se3.make_transform(random_rotation(rng), rng.normal(size=3))
        np.testing.assert_allclose(se3.compose(se3.compose(A, B), C), se3.compose(A, se3.compose(B, C)),
                                   atol=1e-12)
        np.testing.assert_allclose(se3.inverse(se3.compose(A, se3.inverse(A))), np.eye(4), atol=1e-9)


def test_rotation_angle_accuracy_near_extremes():
    for theta in (1e-12, 1e-7, math.pi - 1e-7, math.pi):
        assert se3.rotation_angle(se3.rotz(theta)) == pytest.approx(theta, abs=1e-15)
