"""
Matérn covariance and Gaussian error-curve simulation.

The default MaternSpec is the simulation error process: mean 0, variance 1,
no nugget, scale 1/4, smoothness 5/2, whose covariance at distance d is

    (1 + sqrt(5) d / s + 5 d^2 / (3 s^2)) exp(-sqrt(5) d / s)

Rougher processes (nu = 3/2 and 1/2) use their closed forms as well.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from fnspace.grids import CurveSet, TimeGrid
from funcscan_platform.errors import DataError, DomainError, NumericallySingularCovariance, UnsupportedSmoothness

from .rng import make_rng

logger = logging.getLogger(__name__)

SUPPORTED_SMOOTHNESS = (0.5, 1.5, 2.5)
JITTER = 1e-10
JITTER_ATTEMPTS = 3


@dataclass(frozen=True)
class MaternSpec:
    mean: float = 0.0
    variance: float = 1.0
    nugget: float = 0.0
    scale: float = 0.25
    nu: float = 2.5

    def __post_init__(self):
        if not self.variance > 0:
            raise DataError('Matérn variance must be positive')
        if self.nugget < 0:
            raise DataError('Matérn nugget must be nonnegative')
        if not self.scale > 0:
            raise DataError('Matérn scale must be positive')


def _correlation(r, nu):
    if nu == 2.5:
        root5 = np.sqrt(5.0) * r
        return (1.0 + root5 + 5.0 * r * r / 3.0) * np.exp(-root5)
    if nu == 1.5:
        root3 = np.sqrt(3.0) * r
        return (1.0 + root3) * np.exp(-root3)
    return np.exp(-r)


def matern_cov(d, spec):
    """Covariance at distance ``d`` (scalar or array)."""
    if spec.nu not in SUPPORTED_SMOOTHNESS:
        raise UnsupportedSmoothness(f'Matérn smoothness {spec.nu} is not supported; use one of {SUPPORTED_SMOOTHNESS}')
    d = np.asarray(d, dtype=float)
    if np.any(d < 0) or not np.all(np.isfinite(d)):
        raise DomainError('distances must be finite and nonnegative')
    values = spec.variance * _correlation(d / spec.scale, spec.nu) + np.where(d == 0, spec.nugget, 0.0)
    return float(values) if values.ndim == 0 else values


def covariance_matrix(points, spec):
    """Matérn covariance between every pair of points (a TimeGrid or an array)."""
    t = points.points if isinstance(points, TimeGrid) else np.asarray(points, dtype=float)
    return matern_cov(np.abs(t[:, None] - t[None, :]), spec)


def cholesky_with_jitter(cov):
    """Lower Cholesky factor, adding a growing ridge when the plain factorisation fails."""
    try:
        return linalg.cholesky(cov, lower=True)
    except linalg.LinAlgError:
        pass
    scale = float(np.max(np.diag(cov)))
    for attempt in range(JITTER_ATTEMPTS):
        ridge = JITTER * scale * 10.0 ** attempt
        logger.warning('covariance not numerically positive definite; retrying with ridge',
                       extra={'ridge': ridge, 'attempt': attempt + 1})
        try:
            return linalg.cholesky(cov + ridge * np.eye(cov.shape[0]), lower=True)
        except linalg.LinAlgError:
            continue
    raise NumericallySingularCovariance(
        f'covariance of size {cov.shape[0]} could not be factorised after {JITTER_ATTEMPTS} jitter attempts'
    )


def draw_gaussian_curves(grid, mean, cov, n, seed):
    factor = cholesky_with_jitter(cov)
    rng = make_rng(seed)
    noise = rng.standard_normal((int(n), grid.size))
    return CurveSet(grid, mean + noise @ factor.T)


def draw_error_curves(grid, spec, n, seed):
    """``n`` independent Gaussian curves with Matérn covariance, deterministic given ``seed``."""
    if int(n) < 1:
        raise DataError('need at least one curve')
    return draw_gaussian_curves(grid, spec.mean, covariance_matrix(grid, spec), n, seed)
