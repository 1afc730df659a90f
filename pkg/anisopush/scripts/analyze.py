"""
anisopush analyze: the analysis pipeline over a record CSV.

Outputs (CSV unless noted):

* theta0_histogram, dtheta_histogram, dx_histogram, dy_histogram
* theta0_unwrapped: the initial orientation series per batch
* push_law (coefficients) and push_law_curve (the law on a 1 degree grid)
* dtheta_predicted_histogram: law applied to the empirical theta0 samples
* stddev_table, rmse_table
* cycle_map (fitted map on a 1 degree grid) and stable_directions
* summary.yaml and manifest.yaml

Stationary statistics (theta0 histogram and its peaks) skip ``burn_in`` cycles
of every batch; the law and the cycle map use all records.
"""
import argparse
from dataclasses import asdict
import logging
import os
from pathlib import Path

import numpy as np
import pandas as pd
import yaml

from anisopush.config import AnalysisSection, load_config, CONFIG_ENV_VAR
from anisopush.exceptions import DegenerateMapError, ConfigError
from anisopush.analysis.frames import unwrap_angles
from anisopush.analysis.histograms import (angle_histogram, histogram, bin_range, histogram_peaks,
                                           top_bin_fraction, total_variation)
from anisopush.analysis.push_law import fit_push_law, predict_histogram, fit_cycle_map, angular_coverage_order
from anisopush.analysis.tables import stddev_table, rmse_table
from anisopush.analysis.stable_directions import find_stable_directions, fixed_points_frame
from anisopush.collection.records import read_records, iter_batches, after_burn_in
from anisopush.scripts.manifest import configure_logging, write_manifest

logger = logging.getLogger(__name__)


def unwrapped_series(frame: pd.DataFrame) -> pd.DataFrame:
    parts = []
    for batch, group in iter_batches(frame):
        parts.append(pd.DataFrame({'batch': batch, 'k': group['k'].to_numpy(),
                                   'theta0_deg_unwrapped': unwrap_angles(group['theta0_deg_unwrapped'])}))
    return pd.concat(parts, ignore_index=True)


def run_analysis(frame: pd.DataFrame, options: AnalysisSection, out_dir: Path,
                 angle_bin: float | None = None) -> tuple[list[Path], dict]:
    angle_bin = angle_bin or options.angle_bin_deg
    mm_bin = options.displacement_bin_mm
    written = []

    def save(table: pd.DataFrame, name: str, **kwargs):
        path = out_dir / f"{name}.csv"
        table.to_csv(path, index=False, **kwargs)
        written.append(path)

    stationary = after_burn_in(frame, options.burn_in)
    if stationary.empty:
        logger.warning(f"burn-in of {options.burn_in} cycles leaves no record, using all {len(frame)}")
        stationary = frame

    theta0_hist = angle_histogram(stationary['theta0_deg_unwrapped'], angle_bin)
    save(theta0_hist.to_frame(), 'theta0_histogram')
    save(unwrapped_series(frame), 'theta0_unwrapped')

    dtheta = frame['dtheta_deg'].to_numpy()
    save(histogram(frame['dx'] * 1000.0, mm_bin).to_frame(), 'dx_histogram')
    save(histogram(frame['dy'] * 1000.0, mm_bin).to_frame(), 'dy_histogram')

    order = angular_coverage_order(frame["theta0_deg_unwrapped"], options.fourier_order)
    if order < options.fourier_order:
        logger.warning(f"push law order reduced from {options.fourier_order} to {order} for angular coverage")
    law = fit_push_law(frame, order)
    save(law.to_frame(), 'push_law')
    save(law.curve_frame(), 'push_law_curve')
    predicted_values = law.dtheta(frame['theta0_deg_unwrapped'].to_numpy())
    dtheta_range = bin_range(np.concatenate([dtheta, predicted_values]), angle_bin)
    actual_hist = histogram(dtheta, angle_bin, dtheta_range)
    predicted_hist = predict_histogram(law, frame['theta0_deg_unwrapped'], angle_bin, dtheta_range)
    save(actual_hist.to_frame(), 'dtheta_histogram')
    save(predicted_hist.to_frame(), 'dtheta_predicted_histogram')

    std = stddev_table(frame) if len(frame) >= 2 else None
    if std is not None:
        std.to_csv(out_dir / 'stddev_table.csv')
        written.append(out_dir / 'stddev_table.csv')
    rmse = rmse_table(frame, law)
    rmse.to_csv(out_dir / 'rmse_table.csv')
    written.append(out_dir / 'rmse_table.csv')

    cycle_map = fit_cycle_map(frame, options.fourier_order)
    sampled = cycle_map.sample(1.0)
    save(sampled, 'cycle_map')
    degenerate = False
    try:
        points = find_stable_directions(sampled['theta0_deg'], sampled['next_theta0_deg'])
    except DegenerateMapError as e:
        logger.warning(f"cycle map: {e}")
        points, degenerate = [], True
    save(fixed_points_frame(points), 'stable_directions')

    summary = {
        'records': int(len(frame)),
        'stationary_records': int(len(stationary)),
        'theta0_top_bin_fraction': top_bin_fraction(theta0_hist),
        'theta0_peaks_deg': histogram_peaks(theta0_hist, periodic=True),
        'push_law_order': law.order,
        'push_law_residual_rmse': {k: float(v) for k, v in law.residual_rmse.items()},
        'dtheta_total_variation': total_variation(actual_hist, predicted_hist),
        'cycle_map_order': cycle_map.order,
        'cycle_map_degenerate': degenerate,
        'stable_directions_deg': [p.angle_deg for p in points if p.stable],
        'unstable_directions_deg': [p.angle_deg for p in points if not p.stable],
    }
    summary_path = out_dir / 'summary.yaml'
    with open(summary_path, 'w') as f:
        yaml.safe_dump(summary, f, sort_keys=False)
    written.append(summary_path)
    return written, summary


def main(args) -> int:
    config = None
    if args.config or CONFIG_ENV_VAR in os.environ:
        config = load_config(args.config)
    configure_logging(config)
    options = config.analysis if config is not None else AnalysisSection()
    if args.bins is not None and not args.bins > 0:
        raise ConfigError(f"--bins must be positive, got {args.bins}")

    records_path = Path(args.records)
    frame = read_records(records_path)
    out_dir = Path(args.out) if args.out else records_path.parent / 'analysis'
    out_dir.mkdir(parents=True, exist_ok=True)
    logger.info(f"analyze: {len(frame)} records from {records_path}, output in {out_dir}")

    written, summary = run_analysis(frame, options, out_dir, angle_bin=args.bins)
    logger.info(f"stable directions: {summary['stable_directions_deg']}")
    used = asdict(options)
    used["angle_bin_deg"] = args.bins or options.angle_bin_deg
    write_manifest(out_dir, "analyze", written, config, extra={"records": str(records_path), "analysis": used})
    return 0


def add_arguments(parser: argparse.ArgumentParser):
    parser.add_argument('records', help='record CSV written by simulate (or converted from real data)')
    parser.add_argument('--config', help='run config YAML, for the analysis section (optional)')
    parser.add_argument('--out', help='output directory (default: <records dir>/analysis)')
    parser.add_argument('--bins', type=float, help='angle bin width in degrees (default: analysis.angle_bin_deg)')
