"""
Cycle records: one push followed by one reposition.

CSV schema (one row per cycle, SI lengths, degrees, angles unwrapped)::

    batch, k, x0, y0, theta0_deg_unwrapped, dx, dy, dtheta_deg,
    x_post, y_post, theta_post_deg_unwrapped

``dx, dy, dtheta_deg`` are the push outcome in the initial object frame.
"""
from __future__ import annotations
from dataclasses import dataclass, field
from pathlib import Path
import logging
import math

import numpy as np
import pandas as pd

from anisopush.exceptions import RecordFormatError
from anisopush.analysis.frames import to_iof

logger = logging.getLogger(__name__)

RECORD_COLUMNS = ["batch", "k", "x0", "y0", "theta0_deg_unwrapped", "dx", "dy", "dtheta_deg",
                  "x_post", "y_post", "theta_post_deg_unwrapped"]
INTEGER_COLUMNS = ("batch", "k")


@dataclass(frozen=True)
class CycleRecord:
    batch: int
    k: int
    x0: float
    y0: float
    theta0_deg: float
    dx: float
    dy: float
    dtheta_deg: float
    x_post: float
    y_post: float
    theta_post_deg: float
    # world-frame trajectories of the push and drag phases, when kept
    push_trajectory: object = field(default=None, compare=False, repr=False)
    drag_trajectory: object = field(default=None, compare=False, repr=False)

    @classmethod
    def from_poses(cls, batch: int, k: int, initial, pushed, post, **trajectories) -> "CycleRecord":
        """Build a record from world poses in radians ``(x, y, theta)``."""
        initial = np.asarray(initial, dtype=float)
        delta = to_iof(np.asarray(pushed, dtype=float), initial)
        return cls(batch=batch, k=k,
                   x0=float(initial[0]), y0=float(initial[1]), theta0_deg=math.degrees(initial[2]),
                   dx=float(delta[0]), dy=float(delta[1]), dtheta_deg=math.degrees(delta[2]),
                   x_post=float(post[0]), y_post=float(post[1]), theta_post_deg=math.degrees(post[2]),
                   **trajectories)

    @property
    def initial_pose(self) -> np.ndarray:
        return np.array([self.x0, self.y0, math.radians(self.theta0_deg)])

    @property
    def post_pose(self) -> np.ndarray:
        return np.array([self.x_post, self.y_post, math.radians(self.theta_post_deg)])

    @property
    def next_theta0_increment_deg(self) -> float:
        return self.theta_post_deg - self.theta0_deg

    def row(self) -> list:
        return [self.batch, self.k, self.x0, self.y0, self.theta0_deg, self.dx, self.dy, self.dtheta_deg,
                self.x_post, self.y_post, self.theta_post_deg]


def records_to_frame(records) -> pd.DataFrame:
    if isinstance(records, pd.DataFrame):
        return records
    frame = pd.DataFrame([r.row() for r in records], columns=RECORD_COLUMNS)
    return frame.astype({c: "int64" for c in INTEGER_COLUMNS})


def write_records(records, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    records_to_frame(records).to_csv(path, index=False)
    logger.info(f"Wrote {len(records)} cycle records to {path}")
    return path


def read_records(path) -> pd.DataFrame:
    """
    Load and validate a record CSV.

    Raises
    ------
    FileNotFoundError
    RecordFormatError
        on missing columns, empty files or non-numeric / non-finite cells, naming
        the 1-based data row and the column.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"Records file not found: {path}")
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False)
    except pd.errors.EmptyDataError:
        raise RecordFormatError(f"{path} is empty")

    missing = [c for c in RECORD_COLUMNS if c not in frame.columns]
    if missing:
        raise RecordFormatError(f"{path} lacks column(s) {', '.join(missing)}", column=missing[0])
    if frame.empty:
        raise RecordFormatError(f"{path} contains no records")

    out = pd.DataFrame(index=frame.index)
    for column in RECORD_COLUMNS:
        numeric = pd.to_numeric(frame[column].str.strip(), errors="coerce")
        bad = ~np.isfinite(numeric.to_numpy(dtype=float))
        if column in INTEGER_COLUMNS:
            bad |= np.isfinite(numeric.to_numpy(dtype=float)) & (numeric.to_numpy(dtype=float) % 1 != 0)
        if bad.any():
            row = int(np.flatnonzero(bad)[0])
            raise RecordFormatError(f"invalid value {frame[column].iloc[row]!r} in {path}",
                                    row=row + 1, column=column)
        out[column] = numeric.astype("int64") if column in INTEGER_COLUMNS else numeric.astype(float)
    return out


def iter_batches(frame: pd.DataFrame):
    """Yield ``(batch, frame)`` with each batch sorted by cycle index."""
    for batch, group in frame.groupby("batch", sort=True):
        yield batch, group.sort_values("k")


def after_burn_in(frame: pd.DataFrame, burn_in: int) -> pd.DataFrame:
    """Drop the first ``burn_in`` cycles of every batch."""
    return frame[frame["k"] >= burn_in]
