"""
Initial object frame (IOF) transforms and angle unwrapping.

Poses are ``(..., 3)`` arrays ``(x, y, theta)``; theta in radians unless
``degrees=True``.  Angles are never reduced modulo 360 here.
"""
from __future__ import annotations
import math

import numpy as np
import pandas as pd


def _angle(theta, degrees):
    return math.radians(theta) if degrees else theta


def to_iof(poses, initial, degrees: bool = False) -> np.ndarray:
    """
    Express world poses in the frame where ``initial`` is ``(0, 0, 0)``.

    Parameters
    ----------
    poses : array_like, shape (..., 3)
    initial : array_like, shape (3,)
    degrees : bool
        angles of both inputs and of the output are in degrees.

    Returns
    -------
    np.ndarray of the same shape as ``poses``: (dx, dy, dtheta) with dtheta = theta - theta0.
    """
    poses = np.asarray(poses, dtype=float)
    initial = np.asarray(initial, dtype=float)
    angle = _angle(initial[2], degrees)
    c, s = math.cos(angle), math.sin(angle)
    dx = poses[..., 0] - initial[0]
    dy = poses[..., 1] - initial[1]
    out = np.empty_like(poses)
    out[..., 0] = c * dx + s * dy
    out[..., 1] = -s * dx + c * dy
    out[..., 2] = poses[..., 2] - initial[2]
    return out


def from_iof(iof_poses, initial, degrees: bool = False) -> np.ndarray:
    """Inverse of ``to_iof``."""
    iof_poses = np.asarray(iof_poses, dtype=float)
    initial = np.asarray(initial, dtype=float)
    angle = _angle(initial[2], degrees)
    c, s = math.cos(angle), math.sin(angle)
    out = np.empty_like(iof_poses)
    out[..., 0] = initial[0] + c * iof_poses[..., 0] - s * iof_poses[..., 1]
    out[..., 1] = initial[1] + s * iof_poses[..., 0] + c * iof_poses[..., 1]
    out[..., 2] = iof_poses[..., 2] + initial[2]
    return out


def trajectory_to_iof(frame: pd.DataFrame, initial=None) -> pd.DataFrame:
    """
    Trajectory table (``Trajectory.to_frame`` columns) in the IOF of ``initial``,
    by default the first sample.  Velocities and the pusher position are rotated too.
    """
    frame = frame.copy()
    if initial is None:
        initial = frame[["x", "y", "theta"]].iloc[0].to_numpy()
    initial = np.asarray(initial, dtype=float)
    frame[["x", "y", "theta"]] = to_iof(frame[["x", "y", "theta"]].to_numpy(), initial)

    c, s = math.cos(initial[2]), math.sin(initial[2])
    vx, vy = frame["vx"].to_numpy(), frame["vy"].to_numpy()
    frame["vx"], frame["vy"] = c * vx + s * vy, -s * vx + c * vy
    px = frame["pusher_x"].to_numpy() - initial[0]
    py = frame["pusher_y"].to_numpy() - initial[1]
    frame["pusher_x"], frame["pusher_y"] = c * px + s * py, -s * px + c * py
    return frame


def unwrap_angles(angles_deg) -> np.ndarray:
    """
    Undo the modulo-360 reduction of a sequence of angles in degrees.

    Successive output differences lie in (-180, 180]; the first element is kept.
    """
    angles = np.asarray(angles_deg, dtype=float)
    if angles.size < 2:
        return angles.copy()
    steps = np.diff(angles)
    turns = np.ceil((steps - 180.0) / 360.0)
    out = angles.copy()
    out[1:] -= 360.0 * np.cumsum(turns)
    return out
