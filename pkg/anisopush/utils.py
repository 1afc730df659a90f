from __future__ import annotations
from datetime import datetime, timezone
from pathlib import Path
import hashlib

import numpy as np


def utc_now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def md5(path: str | Path, blocksize: int = 2 ** 20) -> str:
    """hash of written files, goes into the run manifest"""
    h = hashlib.md5()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(blocksize), b""):
            h.update(chunk)
    return h.hexdigest()


def cross2(r, f):
    """z component of r x f, works on (..., 2) arrays."""
    r = np.asarray(r)
    f = np.asarray(f)
    return r[..., 0] * f[..., 1] - r[..., 1] * f[..., 0]


def wrap_deg(angle):
    """Reduce degrees to [0, 360)."""
    wrapped = np.mod(np.asarray(angle, dtype=float), 360.0)
    # np.mod can return 360.0 for tiny negative inputs
    return np.where(wrapped >= 360.0, 0.0, wrapped)


def wrap180(angle):
    """Reduce degrees to (-180, 180]."""
    return 180.0 - np.mod(180.0 - np.asarray(angle, dtype=float), 360.0)


def deep_merge(base: dict, update: dict) -> dict:
    """Recursively merge ``update`` into a copy of ``base``."""
    merged = dict(base)
    for key, value in update.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged
