"""
Spread of push outcomes: population standard deviation (raw variability) and
RMSE against a fitted push law (variability the law leaves unexplained), each
also as a percentage of the signed mean.  dtheta in degrees, dx and dy in mm.
"""
from __future__ import annotations
from dataclasses import dataclass
import logging

import numpy as np
import pandas as pd

from anisopush.collection.records import records_to_frame

logger = logging.getLogger(__name__)

# table row -> (record column, scale to display units)
QUANTITIES = {
    "dtheta_deg": ("dtheta_deg", 1.0),
    "dx_mm": ("dx", 1000.0),
    "dy_mm": ("dy", 1000.0),
}
UNDEFINED = "undefined"


@dataclass(frozen=True)
class ErrorTable:
    statistic: str   # "std" or "rmse"
    values: dict
    means: dict
    percent: dict    # NaN where the mean is zero

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"quantity": list(self.values),
                             self.statistic: list(self.values.values()),
                             "mean": [self.means[q] for q in self.values],
                             "percent_of_mean": [self.percent[q] for q in self.values]})

    def to_csv(self, path) -> None:
        self.to_frame().to_csv(path, index=False, na_rep=UNDEFINED)


def _percent(value: float, mean: float, name: str) -> float:
    if mean == 0:
        logger.warning(f"mean of {name} is zero, percentage undefined")
        return float("nan")
    return 100.0 * value / abs(mean)


def _table(statistic: str, frame: pd.DataFrame, spread) -> ErrorTable:
    values, means, percent = {}, {}, {}
    for name, (column, scale) in QUANTITIES.items():
        data = frame[column].to_numpy(dtype=float) * scale
        means[name] = float(np.mean(data))
        values[name] = float(spread(name, data))
        percent[name] = _percent(values[name], means[name], name)
    return ErrorTable(statistic=statistic, values=values, means=means, percent=percent)


def stddev_table(records) -> ErrorTable:
    """Population standard deviation of (dtheta, dx, dy) and percentage of |mean|."""
    frame = records_to_frame(records)
    if len(frame) < 2:
        raise ValueError(f"stddev_table needs at least 2 records, got {len(frame)}")
    return _table("std", frame, lambda name, data: np.std(data))


def rmse_table(records, law) -> ErrorTable:
    """Root mean squared error of the law's predictions, and percentage of |mean|."""
    frame = records_to_frame(records)
    if len(frame) < 1:
        raise ValueError("rmse_table needs at least 1 record")
    predicted = law.predict(frame["theta0_deg_unwrapped"].to_numpy())

    def rmse(name, data):
        column, scale = QUANTITIES[name]
        error = data - predicted[column].to_numpy() * scale
        return np.sqrt(np.mean(error ** 2))

    return _table("rmse", frame, rmse)
