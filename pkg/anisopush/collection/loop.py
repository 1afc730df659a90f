"""
loop.py
=======

The closed data-collection loop: push the object, drag it back by a rod pinned
in an off-center ring, push again from wherever it came to rest.

Within a batch cycles are sequential, each starting from the previous cycle's
post-drag pose.  Batches are independent and can run in worker processes;
results are always returned in batch order.
"""
from __future__ import annotations
from dataclasses import dataclass, field, replace
import logging
import math
import multiprocessing as mp

import numpy as np
import pandas as pd
from tqdm import tqdm

from anisopush.exceptions import ConfigError
from anisopush.physics.friction import LimitEllipse, ContactPatch, PLYWOOD
from anisopush.physics.dynamics import (RigidBody, BodyState, PusherParams, PushSpec, SimulationSettings,
                                        RodProfile, Trajectory, TrajectoryRecorder, simulate_push, settle,
                                        solve_implicit_twist, step)
from anisopush.collection.records import CycleRecord

logger = logging.getLogger(__name__)

# relative mismatch allowed between the patch normal loads and the body weight
LOAD_TOLERANCE = 1e-6


@dataclass(frozen=True)
class ModelParams:
    body: RigidBody = field(default_factory=RigidBody)
    ellipse: LimitEllipse = PLYWOOD
    patch: ContactPatch | None = None
    pusher: PusherParams = field(default_factory=PusherParams)
    settings: SimulationSettings = field(default_factory=SimulationSettings)

    def __post_init__(self):
        if self.patch is None:
            object.__setattr__(self, "patch", ContactPatch.square_grid(self.body.side, 8, 8, self.body.weight))
        elif not math.isclose(self.patch.total_load, self.body.weight, rel_tol=LOAD_TOLERANCE):
            raise ConfigError(f"contact patch carries {self.patch.total_load:.6g} N, the body weighs "
                              f"{self.body.weight:.6g} N")


@dataclass(frozen=True)
class CollectionConfig:
    push: PushSpec = field(default_factory=PushSpec)
    ring_offset: tuple = (0.0225, -0.0225)  # object frame, m
    drag_target: tuple = (0.0, 0.0)       # world frame, m
    drag_speed: float = 0.05              # m/s
    cycles: int = 100
    batch_orientations_deg: tuple = (0.0, 60.0, 120.0, 180.0, 240.0, 300.0)
    seed: int = 0
    start_placement: str = "drag_target"
    position_noise: float = 0.0           # m, std
    angle_noise_deg: float = 0.0          # deg, std
    save_trajectories: bool = False
    n_jobs: int = 1

    def __post_init__(self):
        if tuple(self.ring_offset) == (0.0, 0.0):
            raise ValueError("ring_offset must be off-center")
        if self.cycles < 1:
            raise ValueError(f"cycles must be >= 1, got {self.cycles}")
        if self.drag_speed <= 0:
            raise ValueError(f"drag_speed must be positive, got {self.drag_speed}")
        if self.start_placement not in ("drag_target", "origin"):
            raise ValueError(f"unknown start_placement {self.start_placement!r}")

    @property
    def perturbed(self) -> bool:
        return self.position_noise > 0 or self.angle_noise_deg > 0


def ring_position(state: BodyState, ring_offset) -> np.ndarray:
    c, s = math.cos(state.theta), math.sin(state.theta)
    rx, ry = ring_offset
    return state.position + np.array([c * rx - s * ry, s * rx + c * ry])


def start_state(theta0_deg: float, cfg: CollectionConfig) -> BodyState:
    """Object at rest with orientation theta0 at the configured start placement."""
    theta = math.radians(theta0_deg)
    if cfg.start_placement == "origin":
        return BodyState.at_rest(0.0, 0.0, theta)
    at_origin = BodyState.at_rest(0.0, 0.0, theta)
    x, y = np.asarray(cfg.drag_target, dtype=float) - ring_position(at_origin, cfg.ring_offset)
    return BodyState.at_rest(x, y, theta)


def drag_to_target(state: BodyState, ring_offset, target, drag_speed: float, body: RigidBody,
                   ellipse: LimitEllipse, patch: ContactPatch, settings: SimulationSettings | None = None,
                   pin_stiffness: float = 1e4, pin_damping: float = 100.0, ramp_time: float = 2.0,
                   record: bool = False) -> tuple[BodyState, Trajectory | None]:
    """
    Drag the object by a rod pinned at ``ring_offset`` (object frame) to ``target``.

    The pin is a spring-damper between rod and ring, torque free.  The rod moves
    in a straight line from the ring to the target, stays there until the object
    is at rest, then is lifted out.
    """
    settings = settings or SimulationSettings()
    dt = settings.dt
    ring_offset = np.asarray(ring_offset, dtype=float)
    start = ring_position(state, ring_offset)
    path = np.asarray(target, dtype=float) - start
    distance = float(np.hypot(*path))
    recorder = TrajectoryRecorder(settings.sample_stride, enabled=record)
    recorder.add(0.0, state, start)
    if distance == 0.0 and state.speed == 0.0 and state.twist[2] == 0.0:
        return state, (recorder.finish() if record else None)

    direction = path / distance if distance > 0 else np.zeros(2)
    profile = RodProfile(distance, drag_speed, ramp_time)
    rod = {"position": start, "velocity": np.zeros(2)}

    def pin_load(current: BodyState):
        c, s = math.cos(current.theta), math.sin(current.theta)
        arm = np.array([c * ring_offset[0] - s * ring_offset[1], s * ring_offset[0] + c * ring_offset[1]])
        # ring velocity = B @ twist
        b = np.array([[1.0, 0.0, -arm[1]], [0.0, 1.0, arm[0]]])
        stretch = rod["position"] - (current.position + arm)
        wrench = b.T @ (pin_stiffness * stretch)
        damping = pin_damping * b.T @ b
        bias = b.T @ (pin_damping * rod["velocity"])
        force = float(np.hypot(*(pin_stiffness * stretch)))
        return wrench, damping, bias, rod["position"], force

    n_steps = int(math.ceil(profile.duration / dt))
    for k in range(n_steps):
        t = k * dt
        rod["position"] = start + direction * profile.position(t)
        rod["velocity"] = direction * profile.velocity(t)
        wrench, damping, bias, pusher_xy, force = pin_load(state)
        twist, friction = solve_implicit_twist(state, body, patch, ellipse, wrench, dt, settings.v_eps,
                                               damping=damping, bias=bias)
        state = step(state, body, wrench + bias - damping @ twist + friction, dt)
        recorder.add(t + dt, state, pusher_xy, force)

    rod["position"] = start + direction * distance
    rod["velocity"] = np.zeros(2)
    state, t_end = settle(state, body, ellipse, patch, settings, recorder, t0=n_steps * dt, external=pin_load)
    logger.debug(f"drag of {distance:.4f} m ended at pose {state.pose}")
    if not record:
        return state, None
    trajectory = recorder.finish()
    trajectory.twist[-1] = state.twist
    return state, trajectory


def reposition(state: BodyState, ring_offset, target, drag_speed: float, body: RigidBody,
               ellipse: LimitEllipse, patch: ContactPatch, dt: float | None = None,
               settings: SimulationSettings | None = None, **kwargs) -> BodyState:
    """Final pose of the ring drag, see ``drag_to_target``."""
    settings = settings or SimulationSettings()
    if dt is not None:
        settings = replace(settings, dt=dt)
    final, _ = drag_to_target(state, ring_offset, target, drag_speed, body, ellipse, patch, settings, **kwargs)
    return final


def _cycle(initial: BodyState, cfg: CollectionConfig, model: ModelParams,
           batch: int, k: int) -> tuple[CycleRecord, BodyState]:
    push = simulate_push(initial, cfg.push, model.body, model.ellipse, model.patch, model.pusher,
                         settings=model.settings, record=cfg.save_trajectories)
    pushed = push.final_state
    post, drag = drag_to_target(pushed, cfg.ring_offset, cfg.drag_target, cfg.drag_speed, model.body,
                                model.ellipse, model.patch, model.settings,
                                pin_stiffness=model.pusher.stiffness, pin_damping=model.pusher.damping,
                                ramp_time=cfg.push.ramp_time, record=cfg.save_trajectories)
    extra = {"push_trajectory": push, "drag_trajectory": drag} if cfg.save_trajectories else {}
    return CycleRecord.from_poses(batch, k, initial.pose, pushed.pose, post.pose, **extra), post


def run_cycle(initial: BodyState, cfg: CollectionConfig, model: ModelParams,
              batch: int = 0, k: int = 0) -> CycleRecord:
    """One push in the object frame at ``initial``, then the drag back to the target."""
    return _cycle(initial, cfg, model, batch, k)[0]


def _perturb(state: BodyState, cfg: CollectionConfig, rng: np.random.Generator) -> BodyState:
    dx, dy = rng.normal(0.0, cfg.position_noise, size=2) if cfg.position_noise > 0 else (0.0, 0.0)
    dtheta = math.radians(rng.normal(0.0, cfg.angle_noise_deg)) if cfg.angle_noise_deg > 0 else 0.0
    return BodyState(pose=state.pose + np.array([dx, dy, dtheta]))


def run_batch(batch: int, cfg: CollectionConfig, model: ModelParams) -> list[CycleRecord]:
    """
    ``cfg.cycles`` cycles from the batch's start orientation.  The start pose
    perturbation, when enabled, is drawn from a generator seeded by (seed, batch).
    """
    rng = np.random.default_rng([cfg.seed, batch])
    state = start_state(cfg.batch_orientations_deg[batch], cfg)
    records = []
    for k in range(cfg.cycles):
        if cfg.perturbed:
            state = _perturb(state, cfg, rng)
        # the next cycle starts exactly where this one came to rest
        record, state = _cycle(state, cfg, model, batch, k)
        records.append(record)
    logger.info(f"batch {batch} done: theta0 {cfg.batch_orientations_deg[batch]} -> "
                f"{records[-1].theta_post_deg:.2f} deg after {cfg.cycles} cycles")
    return records


def _run_batch_task(task):
    return run_batch(*task)


def run_batches(cfg: CollectionConfig, model: ModelParams, progress: bool = True) -> list[CycleRecord]:
    """All batches, concatenated in batch order whatever ``cfg.n_jobs``."""
    tasks = [(batch, cfg, model) for batch in range(len(cfg.batch_orientations_deg))]
    logger.info(f"running {len(tasks)} batch(es) x {cfg.cycles} cycles with {cfg.n_jobs} job(s)")
    records = []
    if cfg.n_jobs == 1 or len(tasks) == 1:
        for batch_records in tqdm(map(_run_batch_task, tasks), total=len(tasks), desc="batches",
                                  disable=not progress):
            records.extend(batch_records)
    else:
        with mp.Pool(processes=min(cfg.n_jobs, len(tasks))) as pool:
            for batch_records in tqdm(pool.imap(_run_batch_task, tasks), total=len(tasks), desc="batches",
                                      disable=not progress):
                records.extend(batch_records)
    return records


def _map_point_task(task):
    theta0_deg, cfg, model = task
    initial = start_state(theta0_deg, cfg)
    return run_cycle(initial, cfg, model, batch=0, k=0)


def cycle_map_estimate(model: ModelParams, cfg: CollectionConfig, grid_deg,
                       progress: bool = True) -> pd.DataFrame:
    """
    Sample the cycle map: one standardized cycle per grid angle, each from the
    canonical start pose of ``cfg.start_placement``.

    Returns
    -------
    DataFrame with theta0_deg, next_theta0_deg (unwrapped) and the push outcome
    dx, dy, dtheta_deg of each cycle.
    """
    grid = [float(a) for a in grid_deg]
    tasks = [(theta0, cfg, model) for theta0 in grid]
    if cfg.n_jobs == 1 or len(tasks) == 1:
        records = list(tqdm(map(_map_point_task, tasks), total=len(tasks), desc="cycle map",
                            disable=not progress))
    else:
        with mp.Pool(processes=min(cfg.n_jobs, len(tasks))) as pool:
            records = list(tqdm(pool.imap(_map_point_task, tasks), total=len(tasks), desc="cycle map",
                                disable=not progress))
    return pd.DataFrame({"theta0_deg": grid,
                         "next_theta0_deg": [r.theta_post_deg for r in records],
                         "dx": [r.dx for r in records],
                         "dy": [r.dy for r in records],
                         "dtheta_deg": [r.dtheta_deg for r in records]})
