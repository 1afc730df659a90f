import numpy as np
import pandas as pd
import pytest
import yaml

from anisopush.physics.friction import LimitEllipse, ContactPatch, PLYWOOD
from anisopush.physics.dynamics import RigidBody, PusherParams, PushSpec, SimulationSettings
from anisopush.collection.loop import ModelParams, CollectionConfig
from anisopush.collection.records import RECORD_COLUMNS


@pytest.fixture
def body():
    return RigidBody()


@pytest.fixture
def isotropic():
    return LimitEllipse.isotropic(0.25)


@pytest.fixture
def plywood():
    return PLYWOOD


@pytest.fixture
def coarse_patch(body):
    # 4 x 4 keeps the simulation tests fast
    return ContactPatch.square_grid(body.side, 4, 4, body.weight)


@pytest.fixture
def pusher():
    return PusherParams()


@pytest.fixture
def settings():
    return SimulationSettings(sample_stride=1)


@pytest.fixture
def short_push():
    return PushSpec(contact_point=(0.0225, -0.045), direction=(0.0, 1.0), distance=0.03, speed=0.02, ramp_time=0.25)


@pytest.fixture
def isotropic_model(body, isotropic, coarse_patch, pusher, settings):
    return ModelParams(body=body, ellipse=isotropic, patch=coarse_patch, pusher=pusher, settings=settings)


@pytest.fixture
def plywood_model(body, coarse_patch, pusher, settings):
    return ModelParams(body=body, ellipse=PLYWOOD, patch=coarse_patch, pusher=pusher, settings=settings)


@pytest.fixture
def short_collection(short_push):
    return CollectionConfig(push=short_push, drag_speed=0.05, cycles=3, batch_orientations_deg=(0.0,), seed=7)


@pytest.fixture
def config_dict():
    """A small but complete run config."""
    return {
        'seed': 3,
        'output_dir': 'out',
        'logging': {'level': 'WARNING'},
        'patch': {'rows': 4, 'cols': 4},
        'push': {'distance': 0.03, 'ramp_time': 0.25},
        'collection': {'cycles': 2, 'batch_orientations_deg': [0.0, 90.0]},
        'analysis': {'burn_in': 0, 'fourier_order': 1},
    }


@pytest.fixture
def config_file(tmp_path, config_dict):
    path = tmp_path / 'config.yaml'
    path.write_text(yaml.safe_dump(config_dict))
    return path


def make_records(theta0_deg, dtheta_deg, dx=None, dy=None, increment_deg=None, batch=0) -> pd.DataFrame:
    """Record table with the given outcomes, poses left at the origin."""
    theta0 = np.asarray(theta0_deg, dtype=float)
    n = theta0.size
    dtheta = np.broadcast_to(np.asarray(dtheta_deg, dtype=float), (n,))
    dx = np.zeros(n) if dx is None else np.broadcast_to(np.asarray(dx, dtype=float), (n,))
    dy = np.zeros(n) if dy is None else np.broadcast_to(np.asarray(dy, dtype=float), (n,))
    increment = dtheta if increment_deg is None else np.broadcast_to(np.asarray(increment_deg, dtype=float), (n,))
    frame = pd.DataFrame({
        'batch': batch, 'k': np.arange(n), 'x0': 0.0, 'y0': 0.0, 'theta0_deg_unwrapped': theta0,
        'dx': dx, 'dy': dy, 'dtheta_deg': dtheta, 'x_post': 0.0, 'y_post': 0.0,
        'theta_post_deg_unwrapped': theta0 + increment,
    })
    return frame[RECORD_COLUMNS]
