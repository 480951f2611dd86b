"""Effect curves and genotype draws for the simulation engine."""

import numpy as np
from scipy import stats

from fnspace.grids import Curve
from funcscan_platform.errors import DataError, DomainError

from .rng import make_rng

EFFECT_NORM = 0.18

SIGNAL_LINEAR = 'linear'
SIGNAL_NORMCDF = 'normcdf'
SIGNAL_SINUSOID = 'sinusoid'
SIGNAL_NULL = 'null'
SIGNAL_KINDS = (SIGNAL_LINEAR, SIGNAL_NORMCDF, SIGNAL_SINUSOID, SIGNAL_NULL)


def signal_values(kind, t):
    """Effect curve evaluated at the points ``t``; each has L2 norm 0.18 on [0, 1]."""
    t = np.asarray(t, dtype=float)
    if kind == SIGNAL_LINEAR:
        return EFFECT_NORM * 2.0 * (t - 0.5) / 0.5773
    if kind == SIGNAL_NORMCDF:
        return EFFECT_NORM * stats.norm.cdf(7.5 * (t - 0.5)) / 0.6517
    if kind == SIGNAL_SINUSOID:
        return EFFECT_NORM * np.sqrt(2.0) * np.cos(2.0 * np.pi * t)
    if kind == SIGNAL_NULL:
        return np.zeros_like(t)
    raise DataError(f'unknown signal {kind!r}; expected one of {", ".join(SIGNAL_KINDS)}')


def signal_curve(kind, grid):
    return Curve(grid, signal_values(kind, grid.points))


def draw_snp(n, maf, seed):
    """``n`` Binomial(2, maf) minor-allele counts centred by 2 * maf."""
    if not 0 < maf <= 0.5:
        raise DomainError(f'minor allele frequency {maf} is outside (0, 0.5]')
    rng = make_rng(seed)
    return rng.binomial(2, maf, size=int(n)).astype(float) - 2.0 * maf
