"""
Pusher-object friction coefficient from force-ratio traces.

While the rod slides along the object, ``F_tau / F_n`` sits on the Coulomb
bound ``+-mu_p``; while it sticks, the ratio stays strictly inside.
"""
from __future__ import annotations
from dataclasses import dataclass
from pathlib import Path
import logging

import numpy as np
import pandas as pd

from anisopush.exceptions import NoSlidingSamplesError, RecordFormatError

logger = logging.getLogger(__name__)

SLIDE_SPEED_THRESHOLD = 1e-3  # m/s
NORMAL_FORCE_FLOOR = 0.05     # N
TRACE_COLUMNS = ("t", "Ftau", "Fn", "vt")


@dataclass(frozen=True)
class ForceTraceSample:
    t: float
    tangential_force: float
    normal_force: float
    slip_speed: float

    @property
    def ratio(self) -> float:
        return self.tangential_force / self.normal_force


@dataclass(frozen=True)
class PusherMuEstimate:
    mu_p: float
    stick_fraction: float   # NaN when the trace has no sticking samples
    n_sliding: int
    n_sticking: int

    def fragment(self) -> dict:
        return {"pusher": {"mu_p": self.mu_p}}


def estimate_pusher_mu(trace, slide_speed_threshold: float = SLIDE_SPEED_THRESHOLD,
                       normal_force_floor: float = NORMAL_FORCE_FLOOR) -> PusherMuEstimate:
    """
    mu_p as the median of |F_tau / F_n| over sliding samples.

    Samples out of contact (``F_n <= 0``) or with ``F_n`` below
    ``normal_force_floor`` are dropped first.  The
    stick fraction is the share of the remaining non-sliding samples whose ratio
    lies strictly inside (-mu_p, mu_p).

    Raises
    ------
    NoSlidingSamplesError
    """
    samples = [s for s in trace if s.normal_force > 0 and s.normal_force >= normal_force_floor]
    ratios = np.array([s.ratio for s in samples], dtype=float)
    sliding = np.array([abs(s.slip_speed) > slide_speed_threshold for s in samples], dtype=bool)
    if not sliding.any():
        raise NoSlidingSamplesError(f"no sample of {len(samples)} kept ({len(trace)} total) slides faster "
                                    f"than {slide_speed_threshold} m/s")
    mu_p = float(np.median(np.abs(ratios[sliding])))
    sticking = ratios[~sliding]
    stick_fraction = float(np.mean(np.abs(sticking) < mu_p)) if sticking.size else float("nan")
    logger.info(f"pusher mu_p = {mu_p:.4f} from {int(sliding.sum())} sliding samples, "
                f"stick fraction {stick_fraction:.3f}")
    return PusherMuEstimate(mu_p=mu_p, stick_fraction=stick_fraction, n_sliding=int(sliding.sum()),
                            n_sticking=int(sticking.size))


def trace_from_trajectory(trajectory) -> list[ForceTraceSample]:
    """Force samples of a simulated push, one per trajectory sample in contact."""
    return [ForceTraceSample(float(t), float(ftau), float(fn), float(vt))
            for t, ftau, fn, vt in zip(trajectory.t, trajectory.tangential_force,
                                       trajectory.normal_force, trajectory.slip_speed)
            if fn > 0]


def read_trace(path) -> list[ForceTraceSample]:
    """CSV with columns t, Ftau, Fn, vt (a trajectory CSV qualifies)."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"Force trace not found: {path}")
    frame = pd.read_csv(path)
    missing = [c for c in TRACE_COLUMNS if c not in frame.columns]
    if missing:
        raise RecordFormatError(f"{path} lacks column(s) {', '.join(missing)}", column=missing[0])
    for column in TRACE_COLUMNS:
        values = pd.to_numeric(frame[column], errors="coerce").to_numpy(dtype=float)
        bad = np.flatnonzero(~np.isfinite(values))
        if bad.size:
            raise RecordFormatError(f"invalid value in {path}", row=int(bad[0]) + 1, column=column)
    return [ForceTraceSample(r.t, r.Ftau, r.Fn, r.vt) for r in frame.itertuples(index=False)]
