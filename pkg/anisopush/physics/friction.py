"""friction.py
===============

Point-contact friction laws and their aggregation over a contact patch.

The anisotropic law is an offset, rotated limit ellipse in the space of
friction-coefficient vectors.  Its axes (m, n) are rotated by ``phi`` from the
surface (x, y) axes and are fixed to the supporting surface, not to the
object.  For a sliding velocity ``v`` the maximum-dissipation principle picks
the boundary point maximizing ``mu . v``; the force on the slider is
``f = -N mu(v)``.  Below the regularization speed ``v_eps`` the force is scaled
linearly by ``|v| / v_eps``.

Everything here is pure: no state, safe to call from any number of workers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import math

import numpy as np

from anisopush.exceptions import InvalidEllipseError, ZeroVelocityError
from anisopush.utils import cross2

DEFAULT_V_EPS = 1e-4  # m/s


@dataclass(frozen=True)
class LimitEllipse:
    mu_a: float
    mu_b: float
    m0: float = 0.0
    n0: float = 0.0
    phi: float = 0.0  # rad

    def __post_init__(self):
        for name in ("mu_a", "mu_b", "m0", "n0", "phi"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidEllipseError(f"{name} must be finite, got {getattr(self, name)}")
        if self.mu_a <= 0 or self.mu_b <= 0:
            raise InvalidEllipseError(f"semi-axes must be positive, got mu_a={self.mu_a}, mu_b={self.mu_b}")
        # origin strictly inside, otherwise some sliding directions would inject energy
        if (self.m0 / self.mu_a) ** 2 + (self.n0 / self.mu_b) ** 2 >= 1.0:
            raise InvalidEllipseError(
                f"ellipse is not dissipative: center ({self.m0}, {self.n0}) puts the origin "
                f"outside semi-axes ({self.mu_a}, {self.mu_b})")

    @classmethod
    def isotropic(cls, mu: float) -> "LimitEllipse":
        return cls(mu_a=mu, mu_b=mu)

    @property
    def rotation(self) -> np.ndarray:
        """columns are the m and n axes expressed in surface coordinates"""
        c, s = math.cos(self.phi), math.sin(self.phi)
        return np.array([[c, -s], [s, c]])

    @property
    def center_xy(self) -> np.ndarray:
        return self.rotation @ np.array([self.m0, self.n0])

    def to_dict(self) -> dict:
        return {"mu_a": self.mu_a, "mu_b": self.mu_b, "m0": self.m0, "n0": self.n0, "phi_rad": self.phi}


# steel square on plywood, identified from sliding experiments
PLYWOOD = LimitEllipse(mu_a=0.2545, mu_b=0.2346, m0=0.0325, n0=0.0082, phi=2.6175)


@dataclass(frozen=True)
class FrictionCoefficientVector:
    mu_m: float
    mu_n: float
    phi: float = 0.0

    @property
    def xy(self) -> np.ndarray:
        c, s = math.cos(self.phi), math.sin(self.phi)
        return np.array([self.mu_m * c - self.mu_n * s, self.mu_m * s + self.mu_n * c])


@dataclass(frozen=True)
class ContactPatch:
    """Rigidly connected support points, positions in the object frame."""
    points: np.ndarray = field(repr=False)
    normal_loads: np.ndarray = field(repr=False)
    rows: int = 8
    cols: int = 8

    def __post_init__(self):
        points = np.asarray(self.points, dtype=float).reshape(-1, 2)
        loads = np.asarray(self.normal_loads, dtype=float).reshape(-1)
        if len(points) == 0:
            raise ValueError("contact patch needs at least one point")
        if len(points) != len(loads):
            raise ValueError(f"{len(points)} points but {len(loads)} normal loads")
        if np.any(loads < 0) or not np.all(np.isfinite(loads)):
            raise ValueError("normal loads must be finite and non-negative")
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "normal_loads", loads)

    @classmethod
    def square_grid(cls, side: float, rows: int = 8, cols: int = 8, total_load: float = 1.0) -> "ContactPatch":
        """Points at the cell centers of a rows x cols grid over the square footprint, equal loads."""
        if side <= 0 or rows < 1 or cols < 1:
            raise ValueError(f"invalid grid: side={side}, rows={rows}, cols={cols}")
        xs = (np.arange(cols) + 0.5) * side / cols - side / 2
        ys = (np.arange(rows) + 0.5) * side / rows - side / 2
        gx, gy = np.meshgrid(xs, ys)
        points = np.column_stack([gx.ravel(), gy.ravel()])
        loads = np.full(len(points), total_load / len(points))
        return cls(points=points, normal_loads=loads, rows=rows, cols=cols)

    @property
    def total_load(self) -> float:
        return float(np.sum(self.normal_loads))


def ellipse_residual(ellipse: LimitEllipse, mu: FrictionCoefficientVector) -> float:
    """< 1 inside the limit ellipse, 1 on the boundary, > 1 outside."""
    return ((mu.mu_m - ellipse.m0) ** 2 / ellipse.mu_a ** 2
            + (mu.mu_n - ellipse.n0) ** 2 / ellipse.mu_b ** 2)


def _coefficients_xy(ellipse: LimitEllipse, velocities: np.ndarray) -> np.ndarray:
    """Vectorized maximum-dissipation coefficients for (k, 2) nonzero velocities, surface frame."""
    rot = ellipse.rotation
    v_mn = velocities @ rot  # row-wise R^T v
    a2, b2 = ellipse.mu_a ** 2, ellipse.mu_b ** 2
    scale = np.sqrt(a2 * v_mn[:, 0] ** 2 + b2 * v_mn[:, 1] ** 2)
    mu_mn = np.column_stack([ellipse.m0 + a2 * v_mn[:, 0] / scale,
                             ellipse.n0 + b2 * v_mn[:, 1] / scale])
    return mu_mn @ rot.T


def max_dissipation_coefficient(ellipse: LimitEllipse, v) -> FrictionCoefficientVector:
    """
    Friction coefficient vector selected by the maximum-dissipation principle.

    Parameters
    ----------
    ellipse : LimitEllipse
        The limit ellipse of the contact.
    v : array-like, shape (2,)
        Sliding velocity in the surface frame (m/s), must be nonzero.

    Returns
    -------
    FrictionCoefficientVector
        The boundary point of the ellipse maximizing ``mu . v``.
    """
    vx, vy = float(v[0]), float(v[1])
    if vx == 0.0 and vy == 0.0:
        raise ZeroVelocityError("maximum dissipation is undefined at zero sliding velocity")
    c, s = math.cos(ellipse.phi), math.sin(ellipse.phi)
    v_m = vx * c + vy * s
    v_n = -vx * s + vy * c
    a2, b2 = ellipse.mu_a ** 2, ellipse.mu_b ** 2
    scale = math.sqrt(a2 * v_m ** 2 + b2 * v_n ** 2)
    return FrictionCoefficientVector(mu_m=ellipse.m0 + a2 * v_m / scale,
                                     mu_n=ellipse.n0 + b2 * v_n / scale,
                                     phi=ellipse.phi)


def point_friction_force(ellipse: LimitEllipse, v, normal_load: float,
                         v_eps: float = DEFAULT_V_EPS) -> np.ndarray:
    """Friction force (N) on a sliding point, opposing motion; linear below ``v_eps``."""
    if normal_load < 0:
        raise ValueError(f"normal load must be non-negative, got {normal_load}")
    if v_eps <= 0:
        raise ValueError(f"regularization speed must be positive, got {v_eps}")
    v = np.asarray(v, dtype=float)
    speed = math.hypot(v[0], v[1])
    if speed == 0.0:
        return np.zeros(2)
    mu = max_dissipation_coefficient(ellipse, v).xy
    return -normal_load * mu * min(1.0, speed / v_eps)


def point_velocities(points_world: np.ndarray, twist) -> np.ndarray:
    """v_i = v_com + omega x r_i for (k, 2) offsets r_i in world orientation."""
    vx, vy, omega = twist
    return np.column_stack([vx - omega * points_world[:, 1], vy + omega * points_world[:, 0]])


def _world_offsets(patch: ContactPatch, theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    pts = patch.points
    return np.column_stack([c * pts[:, 0] - s * pts[:, 1], s * pts[:, 0] + c * pts[:, 1]])


def patch_friction_forces(patch: ContactPatch, ellipse: LimitEllipse, twist, pose,
                          v_eps: float = DEFAULT_V_EPS) -> tuple[np.ndarray, np.ndarray]:
    """Per-point forces (k, 2) and world offsets (k, 2) for the patch at ``pose`` moving with ``twist``."""
    offsets = _world_offsets(patch, pose[2])
    velocities = point_velocities(offsets, twist)
    speeds = np.hypot(velocities[:, 0], velocities[:, 1])
    forces = np.zeros_like(velocities)
    moving = speeds > 0
    if np.any(moving):
        mu = _coefficients_xy(ellipse, velocities[moving])
        gain = np.minimum(1.0, speeds[moving] / v_eps)
        forces[moving] = -(patch.normal_loads[moving] * gain)[:, None] * mu
    return forces, offsets


def patch_friction_wrench(patch: ContactPatch, ellipse: LimitEllipse, twist, pose,
                          v_eps: float = DEFAULT_V_EPS) -> np.ndarray:
    """Total friction wrench (f_x, f_y, T_f) about the center of mass."""
    forces, offsets = patch_friction_forces(patch, ellipse, twist, pose, v_eps)
    return np.array([forces[:, 0].sum(), forces[:, 1].sum(), cross2(offsets, forces).sum()])


def patch_damping(patch: ContactPatch, ellipse: LimitEllipse, twist, pose,
                  v_eps: float = DEFAULT_V_EPS) -> np.ndarray:
    """
    Friction wrench written as a damping matrix with the sliding directions frozen.

    Returns the 3x3 matrix ``D`` with ``D @ twist == -patch_friction_wrench(twist)``.
    Each point contributes ``K_i = N_i / max(|v_i|, v_eps) * (c v_hat^T + P / s)``
    where ``c`` is the ellipse center, ``P = R A^2 R^T`` and ``s = |A R^T v_hat|``.
    Applied to the end-of-step twist, this keeps friction from reversing the
    sliding direction within one integration step.
    """
    offsets = _world_offsets(patch, pose[2])
    velocities = point_velocities(offsets, twist)
    speeds = np.hypot(velocities[:, 0], velocities[:, 1])

    rot = ellipse.rotation
    a2, b2 = ellipse.mu_a ** 2, ellipse.mu_b ** 2
    p_mat = rot @ np.diag([a2, b2]) @ rot.T
    center = ellipse.center_xy

    moving = speeds > 0
    v_hat = np.zeros_like(velocities)
    v_hat[moving] = velocities[moving] / speeds[moving, None]
    e_mn = v_hat @ rot
    s_hat = np.sqrt(a2 * e_mn[:, 0] ** 2 + b2 * e_mn[:, 1] ** 2)
    # at rest the direction is undefined, use the rms semi-axis
    s_hat[~moving] = math.sqrt((a2 + b2) / 2)

    weight = patch.normal_loads / np.maximum(speeds, v_eps)
    k_pts = center[None, :, None] * v_hat[:, None, :] + p_mat[None, :, :] / s_hat[:, None, None]
    k_pts *= weight[:, None, None]

    # B_i = [I | j_i], j_i = (-r_y, r_x)
    j_pts = np.column_stack([-offsets[:, 1], offsets[:, 0]])
    damping = np.empty((3, 3))
    damping[:2, :2] = k_pts.sum(axis=0)
    damping[:2, 2] = np.einsum("kij,kj->i", k_pts, j_pts)
    damping[2, :2] = np.einsum("ki,kij->j", j_pts, k_pts)
    damping[2, 2] = np.einsum("ki,kij,kj->", j_pts, k_pts, j_pts)
    return damping
