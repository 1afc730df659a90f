"""
Limit ellipse identification from sampled friction coefficient vectors.

Direct ellipse-specific least squares (conic A x^2 + B xy + C y^2 + D x + E y + F = 0
under 4AC - B^2 > 0), solved in the numerically stable partitioned form: the
linear part is eliminated and a 3x3 eigenproblem remains.  Samples are centered
and scaled first, so the result is scale and rotation equivariant.
"""
from __future__ import annotations
import logging
import math

import numpy as np
import pandas as pd
from scipy import linalg

from anisopush.exceptions import EllipseFitError, DissipativityError, InvalidEllipseError, RecordFormatError
from anisopush.physics.friction import LimitEllipse

logger = logging.getLogger(__name__)

CIRCLE_TOLERANCE = 1e-8


def fit_conic(points: np.ndarray) -> np.ndarray:
    """Ellipse-constrained conic coefficients (A, B, C, D, E, F) of (n, 2) points."""
    x, y = points[:, 0], points[:, 1]
    quadratic = np.column_stack([x * x, x * y, y * y])
    linear = np.column_stack([x, y, np.ones_like(x)])
    s1 = quadratic.T @ quadratic
    s2 = quadratic.T @ linear
    s3 = linear.T @ linear
    try:
        t = -linalg.solve(s3, s2.T, assume_a="sym")
    except linalg.LinAlgError as e:
        raise EllipseFitError(f"degenerate sample set: {e}") from e
    reduced = s1 + s2 @ t
    # premultiply by the inverse of the constraint matrix [[0, 0, 2], [0, -1, 0], [2, 0, 0]]
    reduced = np.vstack([reduced[2] / 2, -reduced[1], reduced[0] / 2])
    _, vectors = linalg.eig(reduced)
    vectors = np.real(vectors)

    constraint = 4 * vectors[0] * vectors[2] - vectors[1] ** 2
    candidates = np.flatnonzero(constraint > 0)
    if candidates.size == 0:
        raise EllipseFitError("no ellipse-shaped conic fits the samples (hyperbolic or degenerate)")
    design = np.column_stack([quadratic, linear])
    best = None
    for index in candidates:
        quad = vectors[:, index]
        coefficients = np.concatenate([quad, t @ quad])
        coefficients /= np.linalg.norm(coefficients)
        residual = np.linalg.norm(design @ coefficients)
        if best is None or residual < best[0]:
            best = (residual, coefficients)
    return best[1]


def conic_to_parameters(coefficients) -> tuple[float, float, float, float, float]:
    """
    (semi-major, semi-minor, center_x, center_y, phi) of an ellipse conic,
    phi the major axis direction in [0, pi), 0 for circles.
    """
    a, b, c, d, e, f = coefficients
    quad = np.array([[a, b / 2], [b / 2, c]])
    try:
        center = np.linalg.solve(2 * quad, -np.array([d, e]))
    except np.linalg.LinAlgError as err:
        raise EllipseFitError(f"conic has no center: {err}") from err
    f_center = f + 0.5 * (d * center[0] + e * center[1])
    eigenvalues, eigenvectors = np.linalg.eigh(quad)
    squared_axes = -f_center / eigenvalues
    if not np.all(squared_axes > 0):
        raise EllipseFitError(f"fitted conic is not a real ellipse (coefficients {coefficients})")
    axes = np.sqrt(squared_axes)
    major = int(np.argmax(axes))
    semi_major, semi_minor = float(axes[major]), float(axes[1 - major])
    if semi_major - semi_minor <= CIRCLE_TOLERANCE * semi_major:
        phi = 0.0
    else:
        direction = eigenvectors[:, major]
        phi = math.atan2(direction[1], direction[0]) % math.pi
        if phi >= math.pi:
            phi = 0.0
    return semi_major, semi_minor, float(center[0]), float(center[1]), phi


def fit_limit_ellipse(mu_samples) -> LimitEllipse:
    """
    Least-squares limit ellipse through (mu_x, mu_y) samples.

    Returns a LimitEllipse with mu_a >= mu_b and phi in [0, pi).

    Raises
    ------
    EllipseFitError
        fewer than 5 samples, or no ellipse fits.
    DissipativityError
        the fitted ellipse does not contain the origin; ``.parameters`` holds the fit.
    """
    points = np.asarray(mu_samples, dtype=float)
    if points.ndim != 2 or points.shape[1] != 2:
        raise EllipseFitError(f"expected (n, 2) samples, got shape {points.shape}")
    if len(points) < 5:
        raise EllipseFitError(f"need at least 5 samples, got {len(points)}")
    if not np.all(np.isfinite(points)):
        raise EllipseFitError("samples contain non-finite values")

    mean = points.mean(axis=0)
    scale = math.sqrt(np.mean(np.sum((points - mean) ** 2, axis=1)))
    if scale == 0:
        raise EllipseFitError("all samples coincide")
    semi_major, semi_minor, cx, cy, phi = conic_to_parameters(fit_conic((points - mean) / scale))
    semi_major, semi_minor = semi_major * scale, semi_minor * scale
    cx, cy = float(mean[0] + scale * cx), float(mean[1] + scale * cy)

    c, s = math.cos(phi), math.sin(phi)
    parameters = {"mu_a": semi_major, "mu_b": semi_minor,
                  "m0": float(c * cx + s * cy), "n0": float(-s * cx + c * cy), "phi_rad": phi}
    logger.info(f"fitted limit ellipse {parameters}")
    try:
        return LimitEllipse(mu_a=parameters["mu_a"], mu_b=parameters["mu_b"], m0=parameters["m0"],
                            n0=parameters["n0"], phi=parameters["phi_rad"])
    except InvalidEllipseError as e:
        raise DissipativityError(f"fitted ellipse is not dissipative: {e}", parameters) from e


def read_mu_samples(path) -> np.ndarray:
    """CSV with columns mu_x, mu_y."""
    frame = pd.read_csv(path)
    missing = [c for c in ("mu_x", "mu_y") if c not in frame.columns]
    if missing:
        raise RecordFormatError(f"{path} lacks column(s) {', '.join(missing)}", column=missing[0])
    return frame[["mu_x", "mu_y"]].to_numpy(dtype=float)


def ellipse_fragment(ellipse: LimitEllipse) -> dict:
    """Config fragment loadable over a run config."""
    return {"friction": ellipse.to_dict()}
