import math

import numpy as np
import pytest

from anisopush.exceptions import NonFiniteWrenchError, SimulationNotConvergedError
from anisopush.analysis.frames import trajectory_to_iof
from anisopush.physics.dynamics import (RigidBody, BodyState, PushSpec, SimulationSettings, RodProfile,
                                        TrajectoryRecorder, TRAJECTORY_COLUMNS, pusher_contact_force, step, settle,
                                        simulate_push)
from anisopush.physics.friction import ContactPatch, patch_friction_wrench


def test_inertia_of_square(body):
    assert body.inertia == pytest.approx(0.8 * 0.09 ** 2 / 6)
    np.testing.assert_allclose(body.mass_diagonal, [0.8, 0.8, body.inertia])
    with pytest.raises(ValueError):
        RigidBody(mass=0.0)


def test_step_uniform_motion(body):
    state = step(BodyState(pose=(0, 0, 0), twist=(0.01, 0, 0)), body, np.zeros(3), 1e-3)
    assert state.pose[0] == pytest.approx(1e-5)
    np.testing.assert_array_equal(state.twist, [0.01, 0, 0])


def test_step_constant_force(body):
    state = step(BodyState.at_rest(), body, (body.mass, 0.0, 0.0), 1e-3)
    assert state.twist[0] == pytest.approx(1e-3)
    assert state.pose[0] == pytest.approx(1e-6)


def test_step_linear_drag_decays_exponentially(body):
    c, dt = 0.8, 1e-3
    state = BodyState(pose=(0, 0, 0), twist=(0.1, 0, 0))
    for _ in range(1000):
        state = step(state, body, -c * state.twist * np.array([1, 1, 0]), dt)
    assert state.twist[0] == pytest.approx(0.1 * math.exp(-c / body.mass * 1.0), rel=1e-2)


def test_step_rejects_bad_input(body):
    with pytest.raises(NonFiniteWrenchError):
        step(BodyState.at_rest(), body, (np.nan, 0, 0), 1e-3)
    with pytest.raises(ValueError):
        step(BodyState.at_rest(), body, (0, 0, 0), 0.0)


def test_body_state_keeps_unwrapped_angle():
    state = BodyState.at_rest(0.0, 0.0, 7 * math.pi)
    assert state.theta == 7 * math.pi
    assert state == BodyState(pose=(0, 0, 7 * math.pi))


def test_no_contact_when_separated(body, pusher):
    rod = (0.0, -body.side / 2 - pusher.rod_radius - 1e-3)
    contact = pusher_contact_force(BodyState.at_rest(), body, rod, (0.0, 0.0), pusher)
    assert contact.normal_force == 0.0
    assert contact.tangential_force == 0.0
    assert not contact.in_contact


def test_static_penetration(body, pusher):
    rod = (0.0, -body.side / 2 - pusher.rod_radius + 1e-4)
    contact = pusher_contact_force(BodyState.at_rest(), body, rod, (0.0, 0.0), pusher)
    assert contact.normal_force == pytest.approx(1.0)
    assert contact.tangential_force == 0.0
    np.testing.assert_allclose(contact.normal, [0.0, -1.0], atol=1e-15)
    np.testing.assert_allclose(contact.wrench((0, 0))[:2], [0.0, 1.0], atol=1e-12)


def test_sliding_contact_saturates(body, pusher):
    rod = (0.0, -body.side / 2 - pusher.rod_radius + 1e-4)
    moving = BodyState(pose=(0, 0, 0), twist=(0.1, 0, 0))
    contact = pusher_contact_force(moving, body, rod, (0.0, 0.0), pusher)
    assert contact.normal_force == pytest.approx(1.0)
    assert contact.tangential_force == pytest.approx(-0.15)
    # opposes the object's slip along the edge
    assert contact.wrench((0, 0))[0] == pytest.approx(-0.15)


def test_rod_inside_square_pushes_out_of_nearest_face(body, pusher):
    rod = (0.0, -body.side / 2 + 1e-3)
    contact = pusher_contact_force(BodyState.at_rest(), body, rod, (0.0, 0.0), pusher)
    assert contact.penetration == pytest.approx(pusher.rod_radius + 1e-3)
    np.testing.assert_allclose(contact.normal, [0.0, -1.0], atol=1e-15)


def test_rod_profile_without_ramp():
    profile = RodProfile(0.15, 0.02)
    assert profile.duration == pytest.approx(7.5)
    assert profile.position(3.75) == pytest.approx(0.075)
    assert profile.position(10.0) == 0.15
    assert profile.velocity(1.0) == 0.02


def test_rod_profile_with_ramp():
    profile = RodProfile(0.15, 0.02, 0.25)
    assert profile.peak_speed == pytest.approx(0.02)
    assert profile.duration == pytest.approx(7.75)
    assert profile.velocity(0.125) == pytest.approx(0.01)
    assert profile.position(profile.duration) == 0.15
    t = np.linspace(0, profile.duration, 2001)
    positions = np.array([profile.position(ti) for ti in t])
    assert np.all(np.diff(positions) >= 0)
    assert profile.position(profile.duration - 1e-9) == pytest.approx(0.15, abs=1e-12)


def test_rod_profile_short_distance_never_reaches_speed():
    profile = RodProfile(1e-4, 0.02, 0.25)
    assert profile.peak_speed < 0.02
    assert profile.position(profile.duration) == 1e-4
    assert profile.position(profile.duration / 2) == pytest.approx(5e-5)


def test_push_spec_normalizes_and_defaults_orthogonal():
    spec = PushSpec(direction=(0.0, 3.0))
    assert spec.direction == (0.0, 1.0)
    assert PushSpec.orthogonal_to_edge((0.0225, -0.045), 0.09).direction == (0.0, 1.0)
    assert PushSpec.orthogonal_to_edge((0.045, 0.01), 0.09).direction == (-1.0, 0.0)
    with pytest.raises(ValueError):
        PushSpec(distance=0.0)


def test_recorder_keeps_stride_and_last_sample():
    recorder = TrajectoryRecorder(stride=3)
    for k in range(8):
        recorder.add(float(k), BodyState.at_rest(k, 0, 0))
    trajectory = recorder.finish()
    np.testing.assert_array_equal(trajectory.t, [0, 3, 6, 7])
    assert list(trajectory.to_frame().columns) == TRAJECTORY_COLUMNS


def test_push_that_misses(body, isotropic, coarse_patch, pusher, settings):
    start = BodyState.at_rest(0.01, -0.02, 0.4)
    spec = PushSpec(contact_point=(0.2, 0.2), direction=(1.0, 0.0), distance=0.01, speed=0.02)
    trajectory = simulate_push(start, spec, body, isotropic, coarse_patch, pusher, settings=settings)
    assert trajectory.final_state == start
    assert np.all(trajectory.normal_force == 0)


def test_push_through_center_is_symmetric(body, isotropic, coarse_patch, pusher, settings):
    spec = PushSpec(contact_point=(0.0, -body.side / 2), direction=(0.0, 1.0), distance=0.03, speed=0.02)
    trajectory = simulate_push(BodyState.at_rest(), spec, body, isotropic, coarse_patch, pusher, settings=settings)
    final = trajectory.final_state
    assert final.pose[1] > 0.02
    assert final.pose[0] == pytest.approx(0.0, abs=1e-6)
    assert final.theta == pytest.approx(0.0, abs=1e-6)


def test_isotropic_push_is_rotation_invariant(body, isotropic, coarse_patch, pusher, settings, short_push):
    frames = []
    for theta0 in (0.0, 60.0, 120.0, 240.0):
        start = BodyState.at_rest(0.0, 0.0, math.radians(theta0))
        trajectory = simulate_push(start, short_push, body, isotropic, coarse_patch, pusher, settings=settings)
        frames.append(trajectory_to_iof(trajectory.to_frame()))
    reference = frames[0]
    for frame in frames[1:]:
        assert len(frame) == len(reference)
        np.testing.assert_allclose(frame[['x', 'y']].to_numpy(), reference[['x', 'y']].to_numpy(), atol=1e-6)
        np.testing.assert_allclose(frame['theta'].to_numpy(), reference['theta'].to_numpy(), atol=1e-6)


def test_push_respects_coulomb_envelope(body, plywood, coarse_patch, pusher, settings, short_push):
    trajectory = simulate_push(BodyState.at_rest(), short_push, body, plywood, coarse_patch, pusher,
                               settings=settings)
    contact = trajectory.normal_force > 0
    assert contact.any()
    ratio = trajectory.tangential_force[contact] / trajectory.normal_force[contact]
    assert np.all(np.abs(ratio) <= pusher.mu_p + 1e-9)
    # penalty stiffness keeps the rod within a millimetre of the edge
    assert trajectory.normal_force.max() < pusher.stiffness * 1e-3


def test_push_ends_at_rest_with_increasing_time(body, plywood, coarse_patch, pusher, settings, short_push):
    trajectory = simulate_push(BodyState.at_rest(), short_push, body, plywood, coarse_patch, pusher,
                               settings=settings)
    assert np.all(np.diff(trajectory.t) > 0)
    np.testing.assert_array_equal(trajectory.twist[-1], [0.0, 0.0, 0.0])
    assert np.hypot(*trajectory.final_state.position) > 0.01


def test_push_is_deterministic(body, plywood, coarse_patch, pusher, settings, short_push):
    first = simulate_push(BodyState.at_rest(), short_push, body, plywood, coarse_patch, pusher, settings=settings)
    second = simulate_push(BodyState.at_rest(), short_push, body, plywood, coarse_patch, pusher, settings=settings)
    assert first.to_frame().equals(second.to_frame())


def test_unrecorded_push_returns_final_state_only(body, plywood, coarse_patch, pusher, settings, short_push):
    recorded = simulate_push(BodyState.at_rest(), short_push, body, plywood, coarse_patch, pusher,
                             settings=settings)
    bare = simulate_push(BodyState.at_rest(), short_push, body, plywood, coarse_patch, pusher,
                         settings=settings, record=False)
    assert len(bare) == 1
    assert bare.final_state == recorded.final_state


def test_settle_gives_up_after_time_cap(body, plywood, coarse_patch):
    settings = SimulationSettings(settle_time_cap=0.01, rest_steps=50)
    moving = BodyState(pose=(0, 0, 0), twist=(0.1, 0.0, 0.0))
    with pytest.raises(SimulationNotConvergedError) as info:
        settle(moving, body, plywood, coarse_patch, settings)
    assert 'pose' in info.value.diagnostic


def test_default_push_is_quasi_static(body, plywood, pusher, settings):
    # full-size push: 8 x 8 patch, 150 mm at 20 mm/s with the default ramps
    patch = ContactPatch.square_grid(body.side, 8, 8, body.weight)
    trajectory = simulate_push(BodyState.at_rest(), PushSpec(), body, plywood, patch, pusher, settings=settings)
    inertial = body.mass * np.hypot(*(np.diff(trajectory.twist[:, :2], axis=0) / settings.dt).T)
    friction = [np.hypot(*patch_friction_wrench(patch, plywood, twist, pose)[:2])
                for twist, pose in zip(trajectory.twist, trajectory.pose)]
    assert inertial.max() < 0.05 * max(friction)
