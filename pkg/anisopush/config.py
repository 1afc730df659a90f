"""
Run configuration.

A run is described by one YAML file (see the bundled ``config.yaml``).  When no
path is given, the ``ANISOPUSH_CONFIG`` environment variable is used.  Every
section maps onto a frozen dataclass; unknown keys are rejected and values are
validated here, before anything is simulated.
"""
import os
from dataclasses import dataclass, field, fields, asdict
from pathlib import Path
import math

import yaml

from anisopush.exceptions import ConfigError, InvalidEllipseError
from anisopush.utils import deep_merge
from anisopush.physics.friction import LimitEllipse, ContactPatch, PLYWOOD
from anisopush.physics.dynamics import (RigidBody, PusherParams, PushSpec, SimulationSettings)
from anisopush.collection.loop import ModelParams, CollectionConfig

CONFIG_ENV_VAR = 'ANISOPUSH_CONFIG'
START_PLACEMENTS = ('drag_target', 'origin')


def _floats(section, *names):
    for name in names:
        value = getattr(section, name)
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{type(section).__name__}.{name} must be a number, got {value!r}")
        object.__setattr__(section, name, float(value))


def _ints(section, *names):
    for name in names:
        value = getattr(section, name)
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{type(section).__name__}.{name} must be an integer, got {value!r}")


def _pair(section, name, optional=False):
    value = getattr(section, name)
    if value is None and optional:
        return
    try:
        pair = tuple(float(v) for v in value)
    except (TypeError, ValueError):
        raise ConfigError(f"{type(section).__name__}.{name} must be a pair of numbers, got {value!r}")
    if len(pair) != 2:
        raise ConfigError(f"{type(section).__name__}.{name} must have two entries, got {value!r}")
    object.__setattr__(section, name, pair)


def _positive(section, *names):
    for name in names:
        if not getattr(section, name) > 0:
            raise ConfigError(f"{type(section).__name__}.{name} must be positive, got {getattr(section, name)}")


@dataclass(frozen=True)
class LoggingSection:
    level: str = 'INFO'
    file: str | None = None

    def __post_init__(self):
        if str(self.level).upper() not in ('DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL'):
            raise ConfigError(f"unknown log level {self.level!r}")


@dataclass(frozen=True)
class BodySection:
    mass: float = 0.8
    side: float = 0.09
    gravity: float = 9.81

    def __post_init__(self):
        _floats(self, 'mass', 'side', 'gravity')
        _positive(self, 'mass', 'side', 'gravity')


@dataclass(frozen=True)
class FrictionSection:
    mu_a: float = PLYWOOD.mu_a
    mu_b: float = PLYWOOD.mu_b
    m0: float = PLYWOOD.m0
    n0: float = PLYWOOD.n0
    phi_rad: float = PLYWOOD.phi

    def __post_init__(self):
        _floats(self, 'mu_a', 'mu_b', 'm0', 'n0', 'phi_rad')
        try:
            self.ellipse()
        except InvalidEllipseError as e:
            raise ConfigError(f"invalid friction ellipse: {e}") from e

    def ellipse(self) -> LimitEllipse:
        return LimitEllipse(mu_a=self.mu_a, mu_b=self.mu_b, m0=self.m0, n0=self.n0, phi=self.phi_rad)


@dataclass(frozen=True)
class PatchSection:
    rows: int = 8
    cols: int = 8

    def __post_init__(self):
        _ints(self, 'rows', 'cols')
        _positive(self, 'rows', 'cols')


@dataclass(frozen=True)
class PusherSection:
    rod_radius: float = 0.005
    stiffness: float = 1e4
    damping: float = 100.0
    mu_p: float = 0.15
    v_eps: float = 1e-4

    def __post_init__(self):
        _floats(self, 'rod_radius', 'stiffness', 'damping', 'mu_p', 'v_eps')
        _positive(self, 'stiffness', 'v_eps')
        if self.damping < 0 or self.mu_p < 0 or self.rod_radius < 0:
            raise ConfigError(f"pusher damping, mu_p and rod_radius must be non-negative: {self}")


@dataclass(frozen=True)
class PushSection:
    # null: (side/4, -side/2), middle of the right half of the bottom edge
    contact_point: tuple | None = None
    # null: orthogonal to the contacted edge
    direction: tuple | None = None
    distance: float = 0.15
    speed: float = 0.02
    ramp_time: float = 2.0

    def __post_init__(self):
        _pair(self, 'contact_point', optional=True)
        _pair(self, 'direction', optional=True)
        _floats(self, 'distance', 'speed', 'ramp_time')
        _positive(self, 'distance', 'speed')
        if self.ramp_time < 0:
            raise ConfigError(f"push ramp_time must be non-negative, got {self.ramp_time}")
        if self.direction is not None and math.hypot(*self.direction) == 0:
            raise ConfigError("push direction must be nonzero")


@dataclass(frozen=True)
class SimulationSection:
    dt: float = 1e-3
    v_eps: float = 1e-4
    sample_stride: int = 10
    rest_speed: float = 1e-5
    rest_omega: float = 1e-4
    rest_steps: int = 50
    settle_time_cap: float = 10.0

    def __post_init__(self):
        _floats(self, 'dt', 'v_eps', 'rest_speed', 'rest_omega', 'settle_time_cap')
        _ints(self, 'sample_stride', 'rest_steps')
        _positive(self, 'dt', 'v_eps', 'sample_stride', 'rest_speed', 'rest_omega', 'rest_steps',
                  'settle_time_cap')


@dataclass(frozen=True)
class CollectionSection:
    # null: (side/4, -side/4), behind the pushed half of the object
    ring_offset: tuple | None = None
    drag_target: tuple = (0.0, 0.0)
    drag_speed: float = 0.05
    cycles: int = 100
    batch_orientations_deg: tuple = (0.0, 60.0, 120.0, 180.0, 240.0, 300.0)
    start_placement: str = 'drag_target'
    position_noise: float = 0.0
    angle_noise_deg: float = 0.0
    save_trajectories: bool = False
    n_jobs: int = 1

    def __post_init__(self):
        _pair(self, 'ring_offset', optional=True)
        _pair(self, 'drag_target')
        _floats(self, 'drag_speed', 'position_noise', 'angle_noise_deg')
        _ints(self, 'cycles', 'n_jobs')
        _positive(self, 'drag_speed', 'cycles', 'n_jobs')
        try:
            orientations = tuple(float(a) for a in self.batch_orientations_deg)
        except (TypeError, ValueError):
            raise ConfigError(f"batch_orientations_deg must be a list of numbers, "
                              f"got {self.batch_orientations_deg!r}")
        if not orientations:
            raise ConfigError("batch_orientations_deg must not be empty")
        object.__setattr__(self, 'batch_orientations_deg', orientations)
        if self.ring_offset is not None and self.ring_offset == (0.0, 0.0):
            raise ConfigError("ring_offset must be off-center")
        if self.start_placement not in START_PLACEMENTS:
            raise ConfigError(f"start_placement must be one of {START_PLACEMENTS}, got {self.start_placement!r}")
        if self.position_noise < 0 or self.angle_noise_deg < 0:
            raise ConfigError("noise levels must be non-negative")
        if not isinstance(self.save_trajectories, bool):
            raise ConfigError(f"save_trajectories must be true or false, got {self.save_trajectories!r}")


@dataclass(frozen=True)
class AnalysisSection:
    angle_bin_deg: float = 4.0
    displacement_bin_mm: float = 1.0
    fourier_order: int = 8
    burn_in: int = 50

    def __post_init__(self):
        _floats(self, 'angle_bin_deg', 'displacement_bin_mm')
        _ints(self, 'fourier_order', 'burn_in')
        _positive(self, 'angle_bin_deg', 'displacement_bin_mm')
        if self.fourier_order < 0 or self.burn_in < 0:
            raise ConfigError("fourier_order and burn_in must be non-negative")


SECTIONS = {
    'logging': LoggingSection,
    'body': BodySection,
    'friction': FrictionSection,
    'patch': PatchSection,
    'pusher': PusherSection,
    'push': PushSection,
    'simulation': SimulationSection,
    'collection': CollectionSection,
    'analysis': AnalysisSection,
}


@dataclass(frozen=True)
class RunConfig:
    seed: int
    output_dir: str = 'anisopush_output'
    logging: LoggingSection = field(default_factory=LoggingSection)
    body: BodySection = field(default_factory=BodySection)
    friction: FrictionSection = field(default_factory=FrictionSection)
    patch: PatchSection = field(default_factory=PatchSection)
    pusher: PusherSection = field(default_factory=PusherSection)
    push: PushSection = field(default_factory=PushSection)
    simulation: SimulationSection = field(default_factory=SimulationSection)
    collection: CollectionSection = field(default_factory=CollectionSection)
    analysis: AnalysisSection = field(default_factory=AnalysisSection)

    def __post_init__(self):
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or self.seed < 0:
            raise ConfigError(f"seed must be a non-negative integer, got {self.seed!r}")
        side = self.body.side
        if self.push.contact_point is not None:
            px, py = self.push.contact_point
            if max(abs(px), abs(py)) > side / 2 + 1e-12:
                raise ConfigError(f"push contact_point {self.push.contact_point} lies outside the object")

    def to_dict(self) -> dict:
        data = asdict(self)
        for section in SECTIONS:
            for key, value in data[section].items():
                if isinstance(value, tuple):
                    data[section][key] = list(value)
        return data

    def to_yaml(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=False)

    # model builders

    def rigid_body(self) -> RigidBody:
        return RigidBody(mass=self.body.mass, side=self.body.side, gravity=self.body.gravity)

    def ellipse(self) -> LimitEllipse:
        return self.friction.ellipse()

    def contact_patch(self) -> ContactPatch:
        body = self.rigid_body()
        return ContactPatch.square_grid(body.side, self.patch.rows, self.patch.cols, body.weight)

    def pusher_params(self) -> PusherParams:
        p = self.pusher
        return PusherParams(rod_radius=p.rod_radius, stiffness=p.stiffness, damping=p.damping,
                            mu_p=p.mu_p, v_eps=p.v_eps)

    def push_spec(self) -> PushSpec:
        side = self.body.side
        push = self.push
        contact = push.contact_point if push.contact_point is not None else (side / 4, -side / 2)
        kwargs = dict(distance=push.distance, speed=push.speed, ramp_time=push.ramp_time)
        if push.direction is None:
            return PushSpec.orthogonal_to_edge(contact, side, **kwargs)
        return PushSpec(contact_point=contact, direction=push.direction, **kwargs)

    def settings(self) -> SimulationSettings:
        return SimulationSettings(**asdict(self.simulation))

    def ring_offset(self) -> tuple:
        if self.collection.ring_offset is not None:
            return self.collection.ring_offset
        return (self.body.side / 4, -self.body.side / 4)

    def model_params(self) -> ModelParams:
        return ModelParams(body=self.rigid_body(), ellipse=self.ellipse(), patch=self.contact_patch(),
                           pusher=self.pusher_params(), settings=self.settings())

    def collection_config(self) -> CollectionConfig:
        c = self.collection
        return CollectionConfig(push=self.push_spec(), ring_offset=self.ring_offset(), drag_target=c.drag_target,
                                drag_speed=c.drag_speed, cycles=c.cycles,
                                batch_orientations_deg=c.batch_orientations_deg, seed=self.seed,
                                start_placement=c.start_placement, position_noise=c.position_noise,
                                angle_noise_deg=c.angle_noise_deg, save_trajectories=c.save_trajectories,
                                n_jobs=c.n_jobs)


def config_from_dict(data: dict) -> RunConfig:
    if not isinstance(data, dict):
        raise ConfigError(f"config must be a mapping, got {type(data).__name__}")
    known = {f.name for f in fields(RunConfig)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(unknown)}")
    if 'seed' not in data:
        raise ConfigError("'seed' is mandatory")

    kwargs = {'seed': data['seed']}
    if 'output_dir' in data:
        kwargs['output_dir'] = str(data['output_dir'])
    for name, cls in SECTIONS.items():
        section = data.get(name)
        if section is None:
            continue
        if not isinstance(section, dict):
            raise ConfigError(f"section '{name}' must be a mapping")
        allowed = {f.name for f in fields(cls)}
        unknown = sorted(set(section) - allowed)
        if unknown:
            raise ConfigError(f"unknown key(s) in section '{name}': {', '.join(unknown)}")
        try:
            kwargs[name] = cls(**section)
        except (TypeError, ValueError) as e:
            raise ConfigError(f"invalid section '{name}': {e}") from e
    return RunConfig(**kwargs)


def read_yaml(path) -> dict:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"Config file not found: {path}")
    with open(path, 'r') as f:
        try:
            data = yaml.safe_load(f)
        except yaml.YAMLError as e:
            raise ConfigError(f"could not parse {path}: {e}") from e
    return data or {}


def load_config(config_path=None, fragments=()) -> RunConfig:
    """
    Read a run configuration, falling back to ``$ANISOPUSH_CONFIG``.

    Parameters
    ----------
    config_path : str or Path, optional
    fragments : iterable of str or Path
        partial documents (e.g. written by ``anisopush fit``) merged over the base config, in order.
    """
    config_path = config_path or os.environ.get(CONFIG_ENV_VAR)
    if not config_path:
        raise ConfigError(f"Config file path not provided and {CONFIG_ENV_VAR} is not set.")
    data = read_yaml(config_path)
    for fragment in fragments:
        data = deep_merge(data, read_yaml(fragment))
    return config_from_dict(data)


def write_fragment(fragment: dict, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w') as f:
        yaml.safe_dump(fragment, f, sort_keys=False)
    return path


def default_config_path() -> Path:
    return Path(__file__).parent / 'config.yaml'
