"""
push_law.py
===========

Deterministic push law: each push outcome component (dx, dy, dtheta) as a
360-degree periodic function of the initial orientation theta0, fitted by
ordinary least squares on a truncated Fourier basis

    g(theta) = a0 + sum_k a_k cos(k theta) + b_k sin(k theta),   k = 1..K

Also hosts the empirical cycle map fitted from record streams, which uses the
same basis.
"""
from __future__ import annotations
from dataclasses import dataclass
import logging

import numpy as np
import pandas as pd

from anisopush.exceptions import RankDeficientFitError
from anisopush.analysis.histograms import Histogram, histogram
from anisopush.collection.records import records_to_frame
from anisopush.utils import wrap_deg, wrap180

logger = logging.getLogger(__name__)

THETA0_COLUMN = "theta0_deg_unwrapped"
COMPONENTS = ("dx", "dy", "dtheta_deg")
RANK_TOLERANCE = 1e-8


def fourier_design(theta_deg, order: int) -> np.ndarray:
    """Columns [1, cos(theta), sin(theta), ..., cos(K theta), sin(K theta)]."""
    theta = np.deg2rad(np.asarray(theta_deg, dtype=float).ravel())
    k_theta = theta[:, None] * np.arange(1, order + 1)[None, :]
    design = np.empty((theta.size, 2 * order + 1))
    design[:, 0] = 1.0
    design[:, 1::2] = np.cos(k_theta)
    design[:, 2::2] = np.sin(k_theta)
    return design


@dataclass(frozen=True, eq=False)
class FourierSeries:
    coefficients: np.ndarray  # a0, a1, b1, a2, b2, ...

    @property
    def order(self) -> int:
        return (len(self.coefficients) - 1) // 2

    def __call__(self, theta_deg) -> np.ndarray:
        scalar = np.ndim(theta_deg) == 0
        values = fourier_design(theta_deg, self.order) @ self.coefficients
        return float(values[0]) if scalar else values

    def term_names(self) -> list[str]:
        names = ["a0"]
        for k in range(1, self.order + 1):
            names += [f"a{k}", f"b{k}"]
        return names


def fit_fourier(theta_deg, values, order: int) -> tuple[FourierSeries, float]:
    """
    Least-squares Fourier fit of order ``order``.

    Returns
    -------
    (FourierSeries, residual RMSE)

    Raises
    ------
    RankDeficientFitError
        when the samples do not cover enough distinct angles for the order.
    """
    if order < 0:
        raise ValueError(f"Fourier order must be non-negative, got {order}")
    values = np.asarray(values, dtype=float).ravel()
    design = fourier_design(theta_deg, order)
    n_terms = design.shape[1]
    if design.shape[0] < n_terms:
        raise RankDeficientFitError(f"{design.shape[0]} samples cannot determine {n_terms} Fourier terms "
                                    f"(order {order})")
    singular = np.linalg.svd(design, compute_uv=False)
    rank = int(np.sum(singular > RANK_TOLERANCE * singular[0]))
    if rank < n_terms:
        raise RankDeficientFitError(f"Fourier design of order {order} has rank {rank} < {n_terms}: "
                                    f"insufficient angular coverage")
    coefficients, *_ = np.linalg.lstsq(design, values, rcond=None)
    residual = values - design @ coefficients
    return FourierSeries(coefficients), float(np.sqrt(np.mean(residual ** 2)))


@dataclass(frozen=True, eq=False)
class PushLaw:
    dx: FourierSeries
    dy: FourierSeries
    dtheta: FourierSeries
    residual_rmse: dict

    @property
    def order(self) -> int:
        return self.dtheta.order

    def component(self, name: str) -> FourierSeries:
        return {"dx": self.dx, "dy": self.dy, "dtheta_deg": self.dtheta}[name]

    def predict(self, theta0_deg) -> pd.DataFrame:
        theta0_deg = np.atleast_1d(np.asarray(theta0_deg, dtype=float))
        return pd.DataFrame({"theta0_deg": theta0_deg, "dx": self.dx(theta0_deg),
                             "dy": self.dy(theta0_deg), "dtheta_deg": self.dtheta(theta0_deg)})

    def to_frame(self) -> pd.DataFrame:
        """Coefficient table, one row per term."""
        return pd.DataFrame({"term": self.dtheta.term_names(), "dx": self.dx.coefficients,
                             "dy": self.dy.coefficients, "dtheta_deg": self.dtheta.coefficients})

    def curve_frame(self, step_deg: float = 1.0) -> pd.DataFrame:
        """The law sampled on [0, 360), plot data."""
        return self.predict(np.arange(0.0, 360.0, step_deg))


def fit_push_law(records, order: int = 8) -> PushLaw:
    """
    Fit dx, dy, dtheta as functions of theta0.

    Parameters
    ----------
    records : list of CycleRecord or record DataFrame
    order : int
        number of harmonics K; needs at least 2K+1 well-spread samples.
    """
    frame = records_to_frame(records)
    theta0 = frame[THETA0_COLUMN].to_numpy()
    fits = {}
    rmse = {}
    for name in COMPONENTS:
        fits[name], rmse[name] = fit_fourier(theta0, frame[name].to_numpy(), order)
    logger.info(f"Fitted push law of order {order} on {len(frame)} records, residual RMSE "
                f"dtheta {rmse['dtheta_deg']:.4g} deg")
    return PushLaw(dx=fits["dx"], dy=fits["dy"], dtheta=fits["dtheta_deg"], residual_rmse=rmse)


def predict_histogram(law: PushLaw, theta0_samples, width: float, value_range=None,
                      component: str = "dtheta_deg", scale: float = 1.0) -> Histogram:
    """
    Histogram of a law component over sampled initial orientations.

    ``scale`` converts the component before binning (1000 for dx, dy in mm).
    """
    samples = np.asarray(theta0_samples, dtype=float).ravel()
    if samples.size == 0:
        raise ValueError("predict_histogram needs at least one theta0 sample")
    values = law.component(component)(samples) * scale
    return histogram(values, width, value_range)


@dataclass(frozen=True, eq=False)
class CycleMapFit:
    """Empirical cycle map f(theta0) = theta0 + increment(theta0)."""
    increment: FourierSeries
    residual_rmse: float
    n_samples: int

    @property
    def order(self) -> int:
        return self.increment.order

    def __call__(self, theta0_deg):
        return np.asarray(theta0_deg, dtype=float) + self.increment(theta0_deg)

    def sample(self, step_deg: float = 1.0) -> pd.DataFrame:
        grid = np.arange(0.0, 360.0, step_deg)
        return pd.DataFrame({"theta0_deg": grid, "next_theta0_deg": self(grid)})


def angular_coverage_order(theta_deg, max_order: int) -> int:
    """
    Largest order K <= max_order for which every one of 2K+1 equal sectors of
    the circle holds at least one sample.
    """
    theta = wrap_deg(theta_deg)
    for order in range(max_order, 0, -1):
        n_sectors = 2 * order + 1
        occupied = np.unique(np.floor(theta / (360.0 / n_sectors)).astype(int))
        if occupied.size >= n_sectors:
            return order
    return 0


def fit_cycle_map(records, order: int = 8) -> CycleMapFit:
    """
    Fit the cycle map from records: each record carries theta0 and the next
    cycle's theta0 (its post-drag orientation).  The increment is fitted
    reduced to (-180, 180], so whole turns made during a cycle do not count.
    The order is reduced to what the angular coverage of the records supports.
    """
    frame = records_to_frame(records)
    theta0 = frame[THETA0_COLUMN].to_numpy()
    increment = wrap180(frame["theta_post_deg_unwrapped"].to_numpy() - theta0)
    usable = angular_coverage_order(theta0, order)
    if usable < order:
        logger.warning(f"cycle map order reduced from {order} to {usable} for angular coverage")
    series, rmse = fit_fourier(theta0, increment, usable)
    return CycleMapFit(increment=series, residual_rmse=rmse, n_samples=len(frame))
