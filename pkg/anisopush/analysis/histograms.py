"""Fixed-width histograms with an overflow bucket, and comparisons between them."""
from __future__ import annotations
from dataclasses import dataclass
import math

import numpy as np
import pandas as pd

from anisopush.utils import wrap_deg


@dataclass(frozen=True, eq=False)
class Histogram:
    edges: np.ndarray
    counts: np.ndarray
    overflow: int = 0

    def __post_init__(self):
        if len(self.edges) != len(self.counts) + 1:
            raise ValueError(f"{len(self.edges)} edges for {len(self.counts)} bins")
        if np.any(np.diff(self.edges) <= 0):
            raise ValueError("histogram edges must be strictly increasing")

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[:-1] + self.edges[1:])

    @property
    def total(self) -> float:
        return float(self.counts.sum() + self.overflow)

    def to_frame(self) -> pd.DataFrame:
        """Plot-ready table: one row per bin, left/right edge, center and count."""
        return pd.DataFrame({"left": self.edges[:-1], "right": self.edges[1:],
                             "center": self.centers, "count": self.counts})


def bin_range(values, width: float, origin: float = 0.0) -> tuple[float, float]:
    """Smallest ``[lo, hi)`` aligned on ``origin + n * width`` holding all ``values``."""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        return origin, origin + width
    lo = origin + math.floor((values.min() - origin) / width) * width
    hi = origin + (math.floor((values.max() - origin) / width) + 1) * width
    return lo, hi


def histogram(values, width: float, value_range=None) -> Histogram:
    """
    Counts per half-open bin ``[edge, edge + width)`` over ``value_range = (lo, hi)``.

    Values outside ``[lo, hi)`` are not clipped into the end bins, they go to
    ``Histogram.overflow``.  When ``hi - lo`` is not a multiple of ``width`` the
    last bin is the shorter ``[edge, hi)``.  Without a range, one is fitted
    around the data.
    """
    if not width > 0:
        raise ValueError(f"bin width must be positive, got {width}")
    values = np.asarray(values, dtype=float).ravel()
    lo, hi = value_range if value_range is not None else bin_range(values, width)
    if not hi > lo:
        raise ValueError(f"empty histogram range [{lo}, {hi})")
    n_bins = int(math.ceil((hi - lo) / width - 1e-12))
    edges = lo + width * np.arange(n_bins + 1)
    edges[-1] = hi

    inside = (values >= lo) & (values < hi)
    index = np.floor((values[inside] - lo) / width).astype(int)
    index = np.clip(index, 0, n_bins - 1)
    counts = np.bincount(index, minlength=n_bins)
    return Histogram(edges=edges, counts=counts, overflow=int((~inside).sum()))


def angle_histogram(angles_deg, width: float = 4.0) -> Histogram:
    """Histogram over [0, 360) of angles reduced modulo 360."""
    return histogram(wrap_deg(angles_deg), width, (0.0, 360.0))


def total_variation(h1: Histogram, h2: Histogram) -> float:
    """Half the L1 distance between the normalized histograms, overflow included."""
    if h1.edges.shape != h2.edges.shape or not np.allclose(h1.edges, h2.edges, rtol=0, atol=1e-9):
        raise ValueError("total variation needs histograms with identical edges")
    if h1.total == 0 or h2.total == 0:
        raise ValueError("total variation of an empty histogram is undefined")
    p1 = np.append(h1.counts, h1.overflow) / h1.total
    p2 = np.append(h2.counts, h2.overflow) / h2.total
    return 0.5 * float(np.abs(p1 - p2).sum())


def histogram_peaks(hist: Histogram, min_fraction: float = 0.05, periodic: bool = False) -> list[float]:
    """
    Centers of local maxima holding at least ``min_fraction`` of the samples.
    With ``periodic``, the first and last bins are neighbours (angle histograms).
    """
    counts = np.asarray(hist.counts, dtype=float)
    if hist.total == 0:
        return []
    if periodic:
        left, right = np.roll(counts, 1), np.roll(counts, -1)
    else:
        left = np.concatenate([[-np.inf], counts[:-1]])
        right = np.concatenate([counts[1:], [-np.inf]])
    is_peak = (counts >= left) & (counts >= right) & (counts > 0)
    is_peak &= counts >= min_fraction * hist.total
    return [float(c) for c in hist.centers[is_peak]]


def top_bin_fraction(hist: Histogram) -> float:
    if hist.total == 0:
        return 0.0
    return float(hist.counts.max() / hist.total)
