"""
anisopush cycle-map: sample the cycle map f(theta0) with one standardized cycle
per grid angle, then report its fixed points.
"""
import argparse
import logging

import numpy as np

from anisopush.exceptions import ConfigError, DegenerateMapError
from anisopush.analysis.stable_directions import find_stable_directions, fixed_points_frame
from anisopush.collection.loop import cycle_map_estimate
from anisopush.scripts.manifest import resolve_config, configure_logging, output_directory, write_manifest

logger = logging.getLogger(__name__)

DEFAULT_GRID = '0:360:5'


def parse_grid(spec: str) -> np.ndarray:
    """START:STOP:STEP in degrees, STOP excluded."""
    try:
        start, stop, step = (float(part) for part in spec.split(':'))
    except ValueError:
        raise ConfigError(f"grid must be START:STOP:STEP, got {spec!r}")
    if step <= 0 or stop <= start:
        raise ConfigError(f"grid {spec!r} is empty")
    grid = start + step * np.arange(int(np.ceil((stop - start) / step - 1e-12)))
    return grid


def main(args) -> int:
    config = resolve_config(args)
    configure_logging(config)
    out_dir = output_directory(args, config)
    grid = parse_grid(args.grid)
    logger.info(f"cycle-map: {len(grid)} grid angle(s), output in {out_dir}")

    samples = cycle_map_estimate(config.model_params(), config.collection_config(), grid,
                                 progress=not getattr(args, 'quiet', False))
    map_path = out_dir / 'cycle_map.csv'
    samples.to_csv(map_path, index=False)

    try:
        points = find_stable_directions(samples['theta0_deg'], samples['next_theta0_deg'])
    except DegenerateMapError as e:
        logger.warning(f"cycle map: {e}")
        points = []
    report_path = out_dir / 'stable_directions.csv'
    fixed_points_frame(points).to_csv(report_path, index=False)
    for point in points:
        logger.info(f"fixed point at {point.angle_deg:.3f} deg, {point.stability}, slope {point.slope:.3f}")
    write_manifest(out_dir, 'cycle-map', [map_path, report_path], config, extra={'grid': args.grid})
    return 0


def add_arguments(parser: argparse.ArgumentParser):
    parser.add_argument('--config', help='run config YAML (default: $ANISOPUSH_CONFIG)')
    parser.add_argument('--out', help='output directory (default: output_dir of the config)')
    parser.add_argument('--seed', type=int, help='overrides the seed of the config')
    parser.add_argument('--grid', default=DEFAULT_GRID, help=f'START:STOP:STEP in degrees (default {DEFAULT_GRID})')
    parser.add_argument('--n-jobs', type=int, dest='n_jobs', help='worker processes for the grid points')
    parser.add_argument('--quiet', action='store_true', help='no progress bar')
