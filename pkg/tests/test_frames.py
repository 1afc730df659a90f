import math

import numpy as np
import pandas as pd
import pytest

from anisopush.analysis.frames import to_iof, from_iof, trajectory_to_iof, unwrap_angles
from anisopush.physics.dynamics import TRAJECTORY_COLUMNS
from anisopush.utils import wrap_deg, wrap180


def test_identity_initial_pose():
    poses = np.array([[0.1, -0.2, 0.3], [1.0, 2.0, -4.0]])
    np.testing.assert_array_equal(to_iof(poses, (0.0, 0.0, 0.0)), poses)


def test_quarter_turn_by_hand():
    delta = to_iof((1.0, 3.0, math.pi / 2), (1.0, 2.0, math.pi / 2))
    np.testing.assert_allclose(delta, [1.0, 0.0, 0.0], atol=1e-15)
    in_degrees = to_iof((1.0, 3.0, 90.0), (1.0, 2.0, 90.0), degrees=True)
    np.testing.assert_allclose(in_degrees, [1.0, 0.0, 0.0], atol=1e-15)


def test_round_trip_and_isometry():
    rng = np.random.default_rng(0)
    poses = rng.normal(size=(50, 3))
    initial = np.array([0.3, -1.2, 2.1])
    iof = to_iof(poses, initial)
    np.testing.assert_allclose(from_iof(iof, initial), poses, atol=1e-12)
    world_d = np.linalg.norm(poses[:, None, :2] - poses[None, :, :2], axis=-1)
    iof_d = np.linalg.norm(iof[:, None, :2] - iof[None, :, :2], axis=-1)
    np.testing.assert_allclose(iof_d, world_d, atol=1e-12)


def test_angles_are_not_reduced():
    delta = to_iof((0.0, 0.0, 400.0), (0.0, 0.0, 10.0), degrees=True)
    assert delta[2] == 390.0


def test_trajectory_to_iof_rotates_velocities_and_pusher():
    row = {c: 0.0 for c in TRAJECTORY_COLUMNS}
    row.update(x=1.0, y=1.0, theta=math.pi / 2, vx=0.0, vy=0.02, pusher_x=1.0, pusher_y=0.9)
    frame = pd.DataFrame([row], columns=TRAJECTORY_COLUMNS)
    iof = trajectory_to_iof(frame)
    np.testing.assert_allclose(iof[['x', 'y', 'theta']].iloc[0], [0.0, 0.0, 0.0], atol=1e-15)
    np.testing.assert_allclose(iof[['vx', 'vy']].iloc[0], [0.02, 0.0], atol=1e-15)
    np.testing.assert_allclose(iof[['pusher_x', 'pusher_y']].iloc[0], [-0.1, 0.0], atol=1e-12)
    # input untouched
    assert frame['x'].iloc[0] == 1.0


def test_unwrap_examples():
    np.testing.assert_array_equal(unwrap_angles([170.0, -170.0]), [170.0, 190.0])
    np.testing.assert_array_equal(unwrap_angles([25.0, 25.0, 25.0]), [25.0, 25.0, 25.0])
    ramp = np.arange(0.0, 1081.0, 10.0)
    np.testing.assert_array_equal(unwrap_angles(wrap_deg(ramp)), ramp)


def test_unwrap_steps_stay_in_half_open_range():
    rng = np.random.default_rng(1)
    wrapped = wrap_deg(np.cumsum(rng.uniform(-179, 179, size=200)))
    steps = np.diff(unwrap_angles(wrapped))
    assert np.all(steps > -180) and np.all(steps <= 180)


def test_wrap_helpers():
    np.testing.assert_allclose(wrap_deg([-10.0, 360.0, 725.0]), [350.0, 0.0, 5.0])
    np.testing.assert_allclose(wrap180([180.0, -180.0, 190.0]), [180.0, 180.0, -170.0])
    assert wrap_deg(-1e-14) < 360.0
    assert pytest.approx(0.0) == float(wrap180(720.0))
