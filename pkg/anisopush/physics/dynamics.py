"""dynamics.py
===============

Planar Newton-Euler dynamics of a square slider, ``M qdd = F_p + F_f``, with

* a rod pusher modeled as a disc: penalty spring-damper in the normal
  direction, Coulomb friction with coefficient ``mu_p`` tangentially,
* the surface friction wrench of a contact patch (see ``friction.py``).

Integration is semi-implicit Euler (``step``).  The friction terms are
evaluated on the end-of-step twist with their sliding directions frozen at the
start of the step (``solve_implicit_twist``): the regularized laws are far too
stiff for an explicit evaluation at 1 ms, and the frozen-direction form can
never flip a sliding direction inside one step.  The resulting wrench is what
gets handed to ``step``.

Poses are ``(x, y, theta)`` in the world frame, theta unwrapped.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
import logging
import math

import numpy as np
import pandas as pd

from anisopush.exceptions import NonFiniteWrenchError, SimulationNotConvergedError
from anisopush.physics.friction import ContactPatch, LimitEllipse, DEFAULT_V_EPS, patch_damping

logger = logging.getLogger(__name__)

TRAJECTORY_COLUMNS = ["t", "x", "y", "theta", "vx", "vy", "omega",
                      "pusher_x", "pusher_y", "Fn", "Ftau", "vt"]


@dataclass(frozen=True)
class RigidBody:
    mass: float = 0.8      # kg
    side: float = 0.09     # m
    gravity: float = 9.81  # m/s^2

    def __post_init__(self):
        if not (self.mass > 0 and self.side > 0 and self.gravity > 0):
            raise ValueError(f"mass, side and gravity must be positive: {self}")

    @property
    def inertia(self) -> float:
        return self.mass * self.side ** 2 / 6.0

    @property
    def weight(self) -> float:
        return self.mass * self.gravity

    @property
    def mass_diagonal(self) -> np.ndarray:
        return np.array([self.mass, self.mass, self.inertia])


@dataclass(frozen=True, eq=False)
class BodyState:
    pose: np.ndarray
    twist: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        object.__setattr__(self, "pose", np.array(self.pose, dtype=float).reshape(3))
        object.__setattr__(self, "twist", np.array(self.twist, dtype=float).reshape(3))

    @classmethod
    def at_rest(cls, x: float = 0.0, y: float = 0.0, theta: float = 0.0) -> "BodyState":
        return cls(pose=(x, y, theta))

    @property
    def position(self) -> np.ndarray:
        return self.pose[:2]

    @property
    def theta(self) -> float:
        return float(self.pose[2])

    @property
    def speed(self) -> float:
        return math.hypot(self.twist[0], self.twist[1])

    def stopped(self) -> "BodyState":
        return BodyState(pose=self.pose)

    def __eq__(self, other):
        if not isinstance(other, BodyState):
            return NotImplemented
        return np.array_equal(self.pose, other.pose) and np.array_equal(self.twist, other.twist)


@dataclass(frozen=True)
class PusherParams:
    rod_radius: float = 0.005  # m
    stiffness: float = 1e4     # N/m
    damping: float = 100.0     # N s/m
    mu_p: float = 0.15
    v_eps: float = DEFAULT_V_EPS

    def __post_init__(self):
        if self.stiffness <= 0:
            raise ValueError(f"penalty stiffness must be positive, got {self.stiffness}")
        if self.damping < 0 or self.mu_p < 0 or self.rod_radius < 0:
            raise ValueError(f"damping, mu_p and rod radius must be non-negative: {self}")
        if self.v_eps <= 0:
            raise ValueError(f"regularization speed must be positive, got {self.v_eps}")


@dataclass(frozen=True)
class PushSpec:
    """Straight push in the frame of the object at the start of the push."""
    contact_point: tuple = (0.0225, -0.045)  # m, on the object edge
    direction: tuple = (0.0, 1.0)
    distance: float = 0.15                   # m
    speed: float = 0.02                      # m/s
    ramp_time: float = 2.0                   # s, linear acceleration / deceleration of the rod

    def __post_init__(self):
        if self.distance <= 0 or self.speed <= 0:
            raise ValueError(f"push distance and speed must be positive, got {self.distance}, {self.speed}")
        if self.ramp_time < 0:
            raise ValueError(f"ramp time must be non-negative, got {self.ramp_time}")
        norm = math.hypot(*self.direction)
        if norm == 0:
            raise ValueError("push direction must be nonzero")
        object.__setattr__(self, "contact_point", tuple(float(c) for c in self.contact_point))
        object.__setattr__(self, "direction", tuple(float(d) / norm for d in self.direction))

    @classmethod
    def orthogonal_to_edge(cls, contact_point, side: float, **kwargs) -> "PushSpec":
        """Push pointing into the object, orthogonal to the edge nearest to ``contact_point``."""
        px, py = contact_point
        h = side / 2
        if h - abs(px) < h - abs(py):
            direction = (-math.copysign(1.0, px), 0.0)
        else:
            direction = (0.0, -math.copysign(1.0, py))
        return cls(contact_point=contact_point, direction=direction, **kwargs)


@dataclass(frozen=True)
class SimulationSettings:
    dt: float = 1e-3               # s
    v_eps: float = DEFAULT_V_EPS   # m/s, surface friction regularization
    sample_stride: int = 10
    rest_speed: float = 1e-5       # m/s
    rest_omega: float = 1e-4       # rad/s
    rest_steps: int = 50
    settle_time_cap: float = 10.0  # s

    def __post_init__(self):
        if self.dt <= 0 or self.v_eps <= 0:
            raise ValueError(f"dt and v_eps must be positive: {self}")
        if self.sample_stride < 1 or self.rest_steps < 1:
            raise ValueError(f"sample_stride and rest_steps must be >= 1: {self}")
        if self.settle_time_cap <= 0:
            raise ValueError(f"settle_time_cap must be positive, got {self.settle_time_cap}")


@dataclass(frozen=True)
class RodProfile:
    """Trapezoidal speed profile along a straight line."""
    distance: float
    speed: float
    ramp_time: float = 0.0

    @property
    def _accel(self) -> float:
        return self.speed / self.ramp_time if self.ramp_time > 0 else math.inf

    @property
    def peak_speed(self) -> float:
        if self.ramp_time == 0:
            return self.speed
        return min(self.speed, math.sqrt(self._accel * self.distance))

    @property
    def ramp_duration(self) -> float:
        return 0.0 if self.ramp_time == 0 else self.peak_speed / self._accel

    @property
    def duration(self) -> float:
        if self.distance == 0:
            return 0.0
        ramp_dist = self.peak_speed * self.ramp_duration / 2
        return 2 * self.ramp_duration + (self.distance - 2 * ramp_dist) / self.peak_speed

    def position(self, t: float) -> float:
        if self.distance == 0 or t <= 0:
            return 0.0
        t_r, total, v_p = self.ramp_duration, self.duration, self.peak_speed
        if t >= total:
            return self.distance
        if t < t_r:
            return 0.5 * self._accel * t ** 2
        if t <= total - t_r:
            return v_p * t_r / 2 + v_p * (t - t_r)
        return self.distance - 0.5 * self._accel * (total - t) ** 2

    def velocity(self, t: float) -> float:
        if self.distance == 0 or t < 0:
            return 0.0
        t_r, total, v_p = self.ramp_duration, self.duration, self.peak_speed
        if t >= total:
            return 0.0
        if t < t_r:
            return self._accel * t
        if t <= total - t_r:
            return v_p
        return self._accel * (total - t)


@dataclass(frozen=True, eq=False)
class ContactForce:
    normal_force: float        # N, >= 0
    tangential_force: float    # N, along the tangent
    point: np.ndarray          # world coordinates
    normal: np.ndarray         # world, from the object towards the rod
    penetration: float         # m
    slip_speed: float          # m/s, tangential velocity of the object point relative to the rod

    @property
    def tangent(self) -> np.ndarray:
        return np.array([-self.normal[1], self.normal[0]])

    @property
    def in_contact(self) -> bool:
        return self.normal_force > 0

    def wrench(self, com) -> np.ndarray:
        """Force and torque on the object about ``com``."""
        force = -self.normal_force * self.normal + self.tangential_force * self.tangent
        r = self.point - np.asarray(com, dtype=float)[:2]
        return np.array([force[0], force[1], r[0] * force[1] - r[1] * force[0]])


def _no_contact(rod_center) -> ContactForce:
    return ContactForce(0.0, 0.0, np.asarray(rod_center, dtype=float), np.zeros(2), 0.0, 0.0)


def pusher_contact_force(obj: BodyState, body: RigidBody, rod_center, rod_velocity,
                         params: PusherParams) -> ContactForce:
    """
    Penalty normal force and Coulomb tangential force between the rod (a disc)
    and the square footprint of the object.

    The contact point is the closest point of the square to the rod center (a
    corner when the rod is past one).  Returns zero forces when separated.
    """
    x, y, th = obj.pose
    c, s = math.cos(th), math.sin(th)
    dx, dy = rod_center[0] - x, rod_center[1] - y
    px, py = c * dx + s * dy, -s * dx + c * dy
    h = body.side / 2

    if abs(px) <= h and abs(py) <= h:
        # rod center inside the square: push out through the nearest face
        if h - abs(px) <= h - abs(py):
            nx_o, ny_o = math.copysign(1.0, px), 0.0
            qx, qy = nx_o * h, py
            depth = params.rod_radius + h - abs(px)
        else:
            nx_o, ny_o = 0.0, math.copysign(1.0, py)
            qx, qy = px, ny_o * h
            depth = params.rod_radius + h - abs(py)
    else:
        qx, qy = min(max(px, -h), h), min(max(py, -h), h)
        ex, ey = px - qx, py - qy
        dist = math.hypot(ex, ey)
        depth = params.rod_radius - dist
        if depth <= 0:
            return _no_contact(rod_center)
        nx_o, ny_o = ex / dist, ey / dist

    nx, ny = c * nx_o - s * ny_o, s * nx_o + c * ny_o
    rx, ry = c * qx - s * qy, s * qx + c * qy
    vx, vy, omega = obj.twist
    rel_x = vx - omega * ry - rod_velocity[0]
    rel_y = vy + omega * rx - rod_velocity[1]

    depth_rate = nx * rel_x + ny * rel_y
    fn = max(0.0, params.stiffness * depth + params.damping * depth_rate)
    slip = -ny * rel_x + nx * rel_y
    ftau = 0.0
    if fn > 0 and slip != 0.0:
        ftau = -math.copysign(params.mu_p * fn * min(1.0, abs(slip) / params.v_eps), slip)
    return ContactForce(normal_force=fn, tangential_force=ftau, point=np.array([x + rx, y + ry]),
                        normal=np.array([nx, ny]), penetration=depth, slip_speed=slip)


def step(state: BodyState, body: RigidBody, total_wrench, dt: float) -> BodyState:
    """Semi-implicit Euler: twist first, then the pose with the new twist."""
    if dt <= 0:
        raise ValueError(f"time step must be positive, got {dt}")
    wrench = np.asarray(total_wrench, dtype=float)
    if not np.all(np.isfinite(wrench)):
        raise NonFiniteWrenchError(f"non-finite wrench {wrench} at pose {state.pose}")
    twist = state.twist + wrench / body.mass_diagonal * dt
    return BodyState(pose=state.pose + twist * dt, twist=twist)


def solve_implicit_twist(state: BodyState, body: RigidBody, patch: ContactPatch, ellipse: LimitEllipse,
                         wrench, dt: float, v_eps: float = DEFAULT_V_EPS,
                         damping=None, bias=None) -> tuple[np.ndarray, np.ndarray]:
    """
    End-of-step twist with surface friction applied as a frozen-direction damper.

    Solves ``(M/dt + D_f + D) w = M qd/dt + wrench + bias`` where ``D_f`` is the
    patch damping at the current twist and ``D``, ``bias`` are optional extra
    linear terms (pusher slip, drag pin).  Returns ``w`` and the friction
    wrench ``-D_f w``.
    """
    mass = body.mass_diagonal
    friction_damping = patch_damping(patch, ellipse, state.twist, state.pose, v_eps)
    lhs = np.diag(mass / dt) + friction_damping
    rhs = mass * state.twist / dt + np.asarray(wrench, dtype=float)
    if damping is not None:
        lhs = lhs + damping
    if bias is not None:
        rhs = rhs + bias
    twist = np.linalg.solve(lhs, rhs)
    return twist, -friction_damping @ twist


def is_still(state: BodyState, settings: SimulationSettings) -> bool:
    return state.speed < settings.rest_speed and abs(state.twist[2]) < settings.rest_omega


@dataclass(eq=False)
class Trajectory:
    t: np.ndarray
    pose: np.ndarray
    twist: np.ndarray
    pusher: np.ndarray
    normal_force: np.ndarray
    tangential_force: np.ndarray
    slip_speed: np.ndarray

    def __len__(self):
        return len(self.t)

    @property
    def final_state(self) -> BodyState:
        return BodyState(pose=self.pose[-1], twist=self.twist[-1])

    def to_frame(self) -> pd.DataFrame:
        data = np.column_stack([self.t, self.pose, self.twist, self.pusher,
                                self.normal_force, self.tangential_force, self.slip_speed])
        return pd.DataFrame(data, columns=TRAJECTORY_COLUMNS)

    def to_csv(self, path) -> None:
        self.to_frame().to_csv(path, index=False)

    @classmethod
    def from_frame(cls, frame: pd.DataFrame) -> "Trajectory":
        data = frame[TRAJECTORY_COLUMNS].to_numpy(dtype=float)
        return cls(t=data[:, 0], pose=data[:, 1:4], twist=data[:, 4:7], pusher=data[:, 7:9],
                   normal_force=data[:, 9], tangential_force=data[:, 10], slip_speed=data[:, 11])


class TrajectoryRecorder:
    """Collects every ``stride``-th sample plus the last one."""

    def __init__(self, stride: int = 1, enabled: bool = True):
        self.stride = stride
        self.enabled = enabled
        self._rows = []
        self._last = None
        self._count = 0

    def add(self, t, state: BodyState, pusher=(math.nan, math.nan), fn=0.0, ftau=0.0, vt=0.0):
        if not self.enabled:
            return
        row = (t, *state.pose, *state.twist, pusher[0], pusher[1], fn, ftau, vt)
        if self._count % self.stride == 0:
            self._rows.append(row)
            self._last = None
        else:
            self._last = row
        self._count += 1

    def finish(self) -> Trajectory:
        rows = self._rows + ([self._last] if self._last is not None else [])
        return Trajectory.from_frame(pd.DataFrame(rows, columns=TRAJECTORY_COLUMNS))


def settle(state: BodyState, body: RigidBody, ellipse: LimitEllipse, patch: ContactPatch,
           settings: SimulationSettings, recorder: TrajectoryRecorder | None = None,
           t0: float = 0.0, external=None) -> tuple[BodyState, float]:
    """
    Integrate until the object has been still for ``rest_steps`` consecutive steps.

    ``external(state) -> (wrench, damping, bias, pusher_xy, fn)`` adds non-friction
    loads (the drag pin); None means the object slides freely.
    """
    dt = settings.dt
    max_steps = int(math.ceil(settings.settle_time_cap / dt))
    still = 0
    t = t0
    for _ in range(max_steps):
        if still >= settings.rest_steps:
            logger.debug(f"object at rest at t={t:.3f}s, pose {state.pose}")
            return state.stopped(), t
        if external is None:
            wrench, damping, bias, pusher_xy, fn = np.zeros(3), None, None, (math.nan, math.nan), 0.0
        else:
            wrench, damping, bias, pusher_xy, fn = external(state)
        twist, friction = solve_implicit_twist(state, body, patch, ellipse, wrench, dt, settings.v_eps,
                                               damping=damping, bias=bias)
        total = np.asarray(wrench, dtype=float) + friction
        if damping is not None:
            total = total + bias - damping @ twist
        state = step(state, body, total, dt)
        t += dt
        if recorder is not None:
            recorder.add(t, state, pusher_xy, fn)
        still = still + 1 if is_still(state, settings) else 0
    if still >= settings.rest_steps:
        return state.stopped(), t
    raise SimulationNotConvergedError(
        f"object still moving {settings.settle_time_cap}s after the last phase ended",
        diagnostic={"pose": state.pose.tolist(), "twist": state.twist.tolist(), "t": t})


def push_step(state: BodyState, body: RigidBody, ellipse: LimitEllipse, patch: ContactPatch,
              pusher: PusherParams, rod_center, rod_velocity, settings: SimulationSettings):
    """One integration step with the rod at ``rod_center``; returns the new state and the contact."""
    contact = pusher_contact_force(state, body, rod_center, rod_velocity, pusher)
    if not contact.in_contact:
        twist, friction = solve_implicit_twist(state, body, patch, ellipse, np.zeros(3), settings.dt,
                                               settings.v_eps)
        return step(state, body, friction, settings.dt), contact

    fn = contact.normal_force
    normal, tangent = contact.normal, contact.tangent
    r = contact.point - state.position
    normal_wrench = -fn * np.array([normal[0], normal[1], r[0] * normal[1] - r[1] * normal[0]])
    b = np.array([tangent[0], tangent[1], r[0] * tangent[1] - r[1] * tangent[0]])
    rod_slip = float(tangent @ np.asarray(rod_velocity, dtype=float))
    k_slip = pusher.mu_p * fn / max(abs(contact.slip_speed), pusher.v_eps)

    twist, friction = solve_implicit_twist(state, body, patch, ellipse, normal_wrench, settings.dt,
                                           settings.v_eps, damping=k_slip * np.outer(b, b),
                                           bias=k_slip * rod_slip * b)
    slip = float(b @ twist) - rod_slip
    # Coulomb envelope, |F_tau| <= mu_p F_n
    ftau = min(max(-k_slip * slip, -pusher.mu_p * fn), pusher.mu_p * fn)
    new_state = step(state, body, normal_wrench + ftau * b + friction, settings.dt)
    return new_state, replace(contact, tangential_force=ftau, slip_speed=slip)


def simulate_push(start: BodyState, spec: PushSpec, body: RigidBody, ellipse: LimitEllipse,
                  patch: ContactPatch, pusher: PusherParams, dt: float | None = None,
                  settings: SimulationSettings | None = None, record: bool = True) -> Trajectory:
    """
    Simulate one push executed in the frame of the object at ``start``.

    The rod starts touching the contact point, travels ``spec.distance`` along
    the push line, then retracts; integration continues until the object is at
    rest.

    Raises
    ------
    SimulationNotConvergedError
        if the object is still moving ``settle_time_cap`` seconds after the rod stopped.
    """
    settings = settings or SimulationSettings()
    if dt is not None:
        settings = replace(settings, dt=dt)
    dt = settings.dt

    c, s = math.cos(start.theta), math.sin(start.theta)
    cx, cy = spec.contact_point
    ux, uy = spec.direction
    direction = np.array([c * ux - s * uy, s * ux + c * uy])
    contact_world = start.position + np.array([c * cx - s * cy, s * cx + c * cy])
    rod_start = contact_world - direction * pusher.rod_radius
    profile = RodProfile(spec.distance, spec.speed, spec.ramp_time)

    recorder = TrajectoryRecorder(settings.sample_stride, enabled=record)
    state = start
    recorder.add(0.0, state, rod_start)
    n_steps = int(math.ceil(profile.duration / dt))
    for k in range(n_steps):
        t = k * dt
        rod = rod_start + direction * profile.position(t)
        rod_velocity = direction * profile.velocity(t)
        state, contact = push_step(state, body, ellipse, patch, pusher, rod, rod_velocity, settings)
        recorder.add(t + dt, state, rod, contact.normal_force, contact.tangential_force, contact.slip_speed)

    state, t_end = settle(state, body, ellipse, patch, settings, recorder, t0=n_steps * dt)
    if not record:
        recorder = TrajectoryRecorder()
        recorder.add(t_end, state)
    trajectory = recorder.finish()
    # last sample carries the at-rest state
    trajectory.twist[-1] = state.twist
    return trajectory
