"""
Fixed points of a sampled cycle map f(theta0) on the circle.

With g(theta) = wrap180(f(theta) - theta), a fixed point is a zero of g.  The
map is interpolated linearly and periodically between samples; zeros are
bracketed by sign changes and refined with Brent's method.  A fixed point is
stable when |f'| < 1.
"""
from __future__ import annotations
from dataclasses import dataclass
import logging

import numpy as np
import pandas as pd
from scipy.optimize import brentq

from anisopush.exceptions import DegenerateMapError
from anisopush.utils import wrap_deg, wrap180

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FixedPoint:
    angle_deg: float
    slope: float

    @property
    def stable(self) -> bool:
        return abs(self.slope) < 1.0

    @property
    def stability(self) -> str:
        return "stable" if self.stable else "unstable"


def _periodic_samples(theta_deg, next_theta_deg):
    theta = wrap_deg(theta_deg)
    order = np.argsort(theta, kind="stable")
    theta = theta[order]
    gap = wrap180(np.asarray(next_theta_deg, dtype=float)[order] - np.asarray(theta_deg, dtype=float)[order])
    if np.any(np.diff(theta) == 0):
        raise ValueError("cycle map samples must have distinct angles")
    return theta, gap


def find_stable_directions(theta_deg, next_theta_deg) -> list[FixedPoint]:
    """
    Locate the fixed points of a sampled map.

    Parameters
    ----------
    theta_deg : array_like
        sample angles (any branch, distinct modulo 360).
    next_theta_deg : array_like
        f at those angles, possibly unwrapped.

    Returns
    -------
    list of FixedPoint sorted by angle in [0, 360); empty when f - identity never changes sign.

    Raises
    ------
    DegenerateMapError
        when f is the identity on every sample.
    """
    theta, gap = _periodic_samples(theta_deg, next_theta_deg)
    if theta.size == 0:
        return []
    if np.all(gap == 0):
        raise DegenerateMapError("the sampled map is the identity, every angle is a fixed point")

    n = theta.size
    # close the circle
    theta_ext = np.append(theta, theta[0] + 360.0)
    gap_ext = np.append(gap, gap[0])

    points = []
    for i in range(n):
        t0, t1 = theta_ext[i], theta_ext[i + 1]
        g0, g1 = gap_ext[i], gap_ext[i + 1]
        if abs(g1 - g0) > 180.0:
            # g crossed +-180, the map jumped a half turn, no fixed point
            continue
        if g0 == 0.0 and n > 1:
            prev_t = theta[i - 1] - (360.0 if i == 0 else 0.0)
            prev_g = gap[i - 1]
            if abs(g1 - prev_g) <= 180.0:
                slope = 1.0 + (g1 - prev_g) / (t1 - prev_t)
                points.append(FixedPoint(float(wrap_deg(t0)), float(slope)))
            continue
        if g0 * g1 < 0:
            def interpolant(t):
                return g0 + (g1 - g0) * (t - t0) / (t1 - t0)
            root = brentq(interpolant, t0, t1, xtol=1e-12, rtol=4 * np.finfo(float).eps)
            slope = 1.0 + (g1 - g0) / (t1 - t0)
            points.append(FixedPoint(float(wrap_deg(root)), float(slope)))

    points.sort(key=lambda p: p.angle_deg)
    logger.debug(f"found {len(points)} fixed point(s), {sum(p.stable for p in points)} stable")
    return points


def fixed_points_frame(points: list[FixedPoint]) -> pd.DataFrame:
    return pd.DataFrame({"angle_deg": [p.angle_deg for p in points],
                         "stability": [p.stability for p in points],
                         "slope": [p.slope for p in points]},
                        columns=["angle_deg", "stability", "slope"])
