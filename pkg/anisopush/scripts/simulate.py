"""
anisopush simulate: run the push / reposition collection loop of a config.

Writes ``records.csv``, per-cycle trajectories when ``collection.save_trajectories``
is set, and ``manifest.yaml``.
"""
import argparse
import logging
from pathlib import Path

from anisopush.analysis.frames import trajectory_to_iof
from anisopush.collection.loop import run_batches
from anisopush.collection.records import write_records
from anisopush.scripts.manifest import resolve_config, configure_logging, output_directory, write_manifest

logger = logging.getLogger(__name__)


def write_trajectories(records, out_dir: Path) -> list[Path]:
    """Push (world and initial object frame) and drag trajectories of every record."""
    traj_dir = out_dir / 'trajectories'
    traj_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for record in records:
        stem = f"b{record.batch:02d}_k{record.k:04d}"
        if record.push_trajectory is not None:
            push_frame = record.push_trajectory.to_frame()
            written.append(traj_dir / f"{stem}_push.csv")
            push_frame.to_csv(written[-1], index=False)
            written.append(traj_dir / f"{stem}_push_iof.csv")
            trajectory_to_iof(push_frame, record.initial_pose).to_csv(written[-1], index=False)
        if record.drag_trajectory is not None:
            written.append(traj_dir / f"{stem}_drag.csv")
            record.drag_trajectory.to_csv(written[-1])
    logger.info(f"Wrote {len(written)} trajectory files to {traj_dir}")
    return written


def main(args) -> int:
    config = resolve_config(args)
    configure_logging(config)
    out_dir = output_directory(args, config)
    logger.info(f"simulate: {len(config.collection.batch_orientations_deg)} batch(es) x "
                f"{config.collection.cycles} cycles, seed {config.seed}, output in {out_dir}")

    records = run_batches(config.collection_config(), config.model_params(),
                          progress=not getattr(args, 'quiet', False))
    outputs = [write_records(records, out_dir / 'records.csv')]
    if config.collection.save_trajectories:
        outputs += write_trajectories(records, out_dir)
    write_manifest(out_dir, 'simulate', outputs, config)
    logger.info("simulate: done")
    return 0


def add_arguments(parser: argparse.ArgumentParser):
    parser.add_argument('--config', help='run config YAML (default: $ANISOPUSH_CONFIG)')
    parser.add_argument('--out', help='output directory (default: output_dir of the config)')
    parser.add_argument('--seed', type=int, help='overrides the seed of the config')
    parser.add_argument('--n-jobs', type=int, dest='n_jobs', help='worker processes for the batches')
    parser.add_argument('--quiet', action='store_true', help='no progress bar')
