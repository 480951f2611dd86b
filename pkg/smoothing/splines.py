"""
Penalised B-spline smoothing on [0, 1].

A basis of order ``k`` (degree k - 1) is built on equally spaced breakpoints
with the boundary knots repeated; the roughness penalty is the Gram matrix of
the ``m``-th derivatives, integrated exactly with Gauss-Legendre nodes on each
knot interval. A subject's fit solves

    (B^T B + lambda P) c = B^T y
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg
from scipy.interpolate import BSpline

from fnspace.grids import Curve
from funcscan_platform.errors import DataError, DomainError, IllConditionedBasis

logger = logging.getLogger(__name__)

DEFAULT_LAMBDA_GRID = tuple(float(v) for v in np.logspace(-6, 1, 8))
MAX_DEFAULT_KNOTS = 20
RCOND_THRESHOLD = 1e-13


@dataclass(frozen=True)
class SplineConfig:
    basis_order: int = 4
    num_knots: int | None = None
    penalty_order: int = 2
    lambda_grid: tuple = DEFAULT_LAMBDA_GRID
    refinements: int = 1
    fixed_nugget: float | None = None

    def __post_init__(self):
        if self.basis_order < 1:
            raise DataError('basis_order must be at least 1')
        if not 0 <= self.penalty_order < self.basis_order:
            raise DataError('penalty_order must be below basis_order')
        if self.num_knots is not None and self.num_knots < max(self.basis_order, 2):
            raise DataError(f'num_knots ({self.num_knots}) must be at least basis_order ({self.basis_order})')
        grid = tuple(float(v) for v in self.lambda_grid)
        if not grid:
            raise DataError('lambda_grid must not be empty')
        if any(v <= 0 for v in grid) or any(b <= a for a, b in zip(grid, grid[1:])):
            raise DataError('lambda_grid must be strictly positive and strictly increasing')
        object.__setattr__(self, 'lambda_grid', grid)
        if self.refinements < 0:
            raise DataError('refinements must be nonnegative')
        if self.fixed_nugget is not None and self.fixed_nugget < 0:
            raise DataError('fixed_nugget must be nonnegative')

    def knots_for(self, max_observations):
        """Breakpoint count: the configured value, else min(20, max observations + 2)."""
        if self.num_knots is not None:
            return self.num_knots
        return max(self.basis_order, 2, min(MAX_DEFAULT_KNOTS, int(max_observations) + 2))


@dataclass(frozen=True, eq=False)
class SplineBasis:
    order: int
    num_knots: int
    knots: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        degree = self.order - 1
        breakpoints = np.linspace(0.0, 1.0, self.num_knots)
        knots = np.concatenate([np.zeros(degree), breakpoints, np.ones(degree)])
        knots.setflags(write=False)
        object.__setattr__(self, 'knots', knots)

    @property
    def degree(self):
        return self.order - 1

    @property
    def size(self):
        return self.num_knots + self.order - 2

    @property
    def breakpoints(self):
        return self.knots[self.degree:self.knots.size - self.degree]

    def _spline(self, derivative=0):
        spline = BSpline(self.knots, np.eye(self.size), self.degree, extrapolate=True)
        return spline.derivative(derivative) if derivative else spline

    def evaluate(self, times, derivative=0):
        """Basis functions (or their derivatives) at ``times``, shape (len(times), size)."""
        times = np.asarray(times, dtype=float).ravel()
        if np.any(times < 0.0) or np.any(times > 1.0):
            raise DomainError('spline basis is only defined on [0, 1]')
        if derivative >= self.order:
            return np.zeros((times.size, self.size))
        return np.atleast_2d(self._spline(derivative)(times))

    def penalty(self, derivative):
        """int B^(m)(t) B^(m)(t)^T dt over [0, 1]."""
        if derivative >= self.order:
            return np.zeros((self.size, self.size))
        nodes, weights = np.polynomial.legendre.leggauss(max(self.order - derivative, 1))
        spline = self._spline(derivative)
        gram = np.zeros((self.size, self.size))
        edges = np.unique(self.breakpoints)
        for left, right in zip(edges[:-1], edges[1:]):
            half = 0.5 * (right - left)
            values = spline(left + half * (nodes + 1.0))
            gram += half * (values.T * weights) @ values
        return 0.5 * (gram + gram.T)


@dataclass(frozen=True, eq=False)
class PenalizedSplineFit:
    basis: SplineBasis
    coefficients: np.ndarray
    smoothing: float = 0.0

    def evaluate(self, times):
        return self.basis.evaluate(times) @ self.coefficients

    def to_curve(self, grid):
        return Curve(grid, self.evaluate(grid.points))


def solve_penalized(gram, rhs, penalty, smoothing):
    """Solve (gram + smoothing * penalty) c = rhs, refusing numerically singular systems."""
    system = gram + smoothing * penalty
    eigenvalues = np.linalg.eigvalsh(0.5 * (system + system.T))
    top = float(eigenvalues[-1])
    rcond = float(eigenvalues[0]) / top if top > 0 else 0.0
    if rcond < RCOND_THRESHOLD:
        raise IllConditionedBasis(
            f'penalised normal equations are singular (rcond={rcond:.2e}, lambda={smoothing:g})'
        )
    return linalg.solve(system, rhs, assume_a='pos')


def fit_spline(times, values, basis, smoothing, penalty_order=2):
    """Penalised least-squares spline through (times, values); smoothing may be 0."""
    design = basis.evaluate(times)
    values = np.asarray(values, dtype=float).ravel()
    if design.shape[0] != values.size:
        raise DataError('times and values must have the same length')
    penalty = basis.penalty(penalty_order)
    coefficients = solve_penalized(design.T @ design, design.T @ values, penalty, smoothing)
    return PenalizedSplineFit(basis, coefficients, float(smoothing))


def resample(fit, grid):
    """Evaluate a spline fit (or re-grid a Curve by linear interpolation) on ``grid``."""
    if isinstance(fit, PenalizedSplineFit):
        return fit.to_curve(grid)
    if isinstance(fit, Curve):
        if fit.grid == grid:
            return fit
        return Curve(grid, np.interp(grid.points, fit.grid.points, fit.values))
    raise DataError(f'cannot resample a {type(fit).__name__}')
