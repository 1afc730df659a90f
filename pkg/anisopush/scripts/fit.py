"""
anisopush fit ellipse SAMPLES.csv     (columns mu_x, mu_y)
anisopush fit pusher-mu TRACE.csv     (columns t, Ftau, Fn, vt)

Each writes a YAML fragment that can be merged over a run config
(``load_config(path, fragments=[...])``).
"""
import argparse
import logging
from pathlib import Path

from anisopush.config import write_fragment
from anisopush.fitting.ellipse import fit_limit_ellipse, read_mu_samples, ellipse_fragment
from anisopush.fitting.pusher_mu import (estimate_pusher_mu, read_trace, SLIDE_SPEED_THRESHOLD,
                                         NORMAL_FORCE_FLOOR)
from anisopush.scripts.manifest import configure_logging, write_manifest

logger = logging.getLogger(__name__)


def fit_ellipse(args, out_dir: Path) -> tuple[Path, dict]:
    path = Path(args.input)
    if not path.is_file():
        raise FileNotFoundError(f"Samples file not found: {path}")
    ellipse = fit_limit_ellipse(read_mu_samples(path))
    fragment = ellipse_fragment(ellipse)
    return write_fragment(fragment, out_dir / 'friction_fragment.yaml'), fragment


def fit_pusher_mu(args, out_dir: Path) -> tuple[Path, dict]:
    estimate = estimate_pusher_mu(read_trace(args.input), args.slide_threshold, args.fn_floor)
    fragment = estimate.fragment()
    path = write_fragment(fragment, out_dir / 'pusher_fragment.yaml')
    return path, {**fragment, 'stick_fraction': estimate.stick_fraction}


def main(args) -> int:
    configure_logging()
    out_dir = Path(args.out) if args.out else Path(args.input).parent
    out_dir.mkdir(parents=True, exist_ok=True)
    if args.target == 'ellipse':
        path, result = fit_ellipse(args, out_dir)
    else:
        path, result = fit_pusher_mu(args, out_dir)
    logger.info(f"fit {args.target}: {result}, fragment written to {path}")
    write_manifest(out_dir, f"fit {args.target}", [path], extra={'input': str(args.input)})
    return 0


def add_arguments(parser: argparse.ArgumentParser):
    parser.add_argument('target', choices=['ellipse', 'pusher-mu'])
    parser.add_argument('input', help='mu samples (ellipse) or force trace (pusher-mu) CSV')
    parser.add_argument('--out', help='output directory (default: directory of the input)')
    parser.add_argument('--slide-threshold', type=float, default=SLIDE_SPEED_THRESHOLD, dest='slide_threshold',
                        help='pusher-mu: relative tangential speed above which a sample slides, m/s')
    parser.add_argument('--fn-floor', type=float, default=NORMAL_FORCE_FLOOR, dest='fn_floor',
                        help='pusher-mu: samples with a smaller normal force are dropped, N')
