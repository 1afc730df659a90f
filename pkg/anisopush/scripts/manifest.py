"""Shared plumbing of the subcommands: config resolution, output directory, run manifest."""
from pathlib import Path
import logging
import sys

import yaml

from anisopush import __version__
from anisopush.config import load_config, RunConfig, config_from_dict
from anisopush.logger import setup_logger, level_from_name
from anisopush.utils import utc_now, md5, deep_merge

logger = logging.getLogger(__name__)

MANIFEST_NAME = 'manifest.yaml'


def resolve_config(args) -> RunConfig:
    """Config from --config (or $ANISOPUSH_CONFIG), with --seed and --n-jobs applied."""
    config = load_config(getattr(args, 'config', None))
    overrides = {}
    if getattr(args, 'seed', None) is not None:
        overrides['seed'] = args.seed
    if getattr(args, 'n_jobs', None) is not None:
        overrides['collection'] = {'n_jobs': args.n_jobs}
    if overrides:
        config = config_from_dict(deep_merge(config.to_dict(), overrides))
    return config


def configure_logging(config: RunConfig | None = None):
    if config is None:
        return setup_logger()
    return setup_logger(level_from_name(config.logging.level), config.logging.file)


def output_directory(args, config: RunConfig | None = None, fallback='anisopush_output') -> Path:
    out = getattr(args, 'out', None) or (config.output_dir if config is not None else fallback)
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def write_manifest(out_dir: Path, command: str, outputs, config: RunConfig | None = None,
                   extra: dict | None = None) -> Path:
    """
    Everything needed to rerun a command: version, arguments, the full config
    and the md5 of each file written.
    """
    out_dir = Path(out_dir)
    manifest = {
        'command': command,
        'argv': sys.argv[1:],
        'version': __version__,
        'seed': config.seed if config is not None else None,
        'created': utc_now(),
        'config': config.to_dict() if config is not None else None,
        'outputs': {str(Path(p).relative_to(out_dir)): md5(p) for p in sorted(map(Path, outputs))},
    }
    if extra:
        manifest.update(extra)
    path = out_dir / MANIFEST_NAME
    with open(path, 'w') as f:
        yaml.safe_dump(manifest, f, sort_keys=False)
    logger.info(f"Wrote manifest {path}")
    return path
