"""
Grid-valued elements of L2[0,1].

Everything in the toolkit is evaluated on a shared TimeGrid. Integrals use
trapezoidal quadrature weights attached to the grid, so an inner product is
``sum(w * f * g)`` and a kernel acts through ``K @ (w * f)``.

Design:
- Types are frozen; the backing arrays are marked read-only so a grid or a
  curve handed to a worker thread cannot be mutated underneath another.
- Grid identity is value equality of the points, not object identity, so
  curves read back from disk can be combined with freshly built ones.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from funcscan_platform.errors import DataError, GridMismatch, InvalidKernel

SYMMETRY_RTOL = 1e-12


def _frozen(values, dtype=float):
    array = np.array(values, dtype=dtype, copy=True)
    array.setflags(write=False)
    return array


def trapezoid_weights(points):
    points = np.asarray(points, dtype=float)
    gaps = np.diff(points)
    weights = np.zeros_like(points)
    weights[:-1] += gaps / 2.0
    weights[1:] += gaps / 2.0
    return weights


@dataclass(frozen=True, eq=False)
class TimeGrid:
    points: np.ndarray
    weights: np.ndarray = field(default=None)

    def __post_init__(self):
        points = np.asarray(self.points, dtype=float).ravel()
        if points.size < 2:
            raise DataError('a time grid needs at least 2 points')
        if not np.all(np.isfinite(points)):
            raise DataError('grid points must be finite')
        if np.any(np.diff(points) <= 0):
            raise DataError('grid points must be strictly increasing')
        if points[0] < 0.0 or points[-1] > 1.0:
            raise DataError('grid points must lie in [0, 1]')
        weights = trapezoid_weights(points) if self.weights is None else np.asarray(self.weights, dtype=float)
        if weights.shape != points.shape:
            raise DataError('quadrature weights must match the grid length')
        if np.any(weights <= 0):
            raise DataError('quadrature weights must be positive')
        object.__setattr__(self, 'points', _frozen(points))
        object.__setattr__(self, 'weights', _frozen(weights))

    @classmethod
    def uniform(cls, size, start=0.0, stop=1.0):
        return cls(np.linspace(start, stop, int(size)))

    @property
    def size(self):
        return self.points.size

    @property
    def span(self):
        return float(self.points[-1] - self.points[0])

    def __len__(self):
        return self.size

    def __eq__(self, other):
        if not isinstance(other, TimeGrid):
            return NotImplemented
        return self is other or (
            self.size == other.size
            and np.array_equal(self.points, other.points)
            and np.array_equal(self.weights, other.weights)
        )

    def __hash__(self):
        return hash((self.size, self.points.tobytes()))

    def __repr__(self):
        return f'TimeGrid(size={self.size}, start={self.points[0]:g}, stop={self.points[-1]:g})'

    def require_same(self, other, what='curves'):
        if self != other:
            raise GridMismatch(f'{what} are defined on different time grids ({self!r} vs {other!r})')


@dataclass(frozen=True, eq=False)
class Curve:
    grid: TimeGrid
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float).ravel()
        if values.shape != (self.grid.size,):
            raise DataError(f'curve has {values.size} values for a grid of {self.grid.size} points')
        if not np.all(np.isfinite(values)):
            raise DataError('curve values must be finite')
        object.__setattr__(self, 'values', _frozen(values))

    @classmethod
    def from_function(cls, grid, func):
        return cls(grid, func(grid.points))

    @classmethod
    def constant(cls, grid, value):
        return cls(grid, np.full(grid.size, float(value)))

    def __len__(self):
        return self.grid.size

    def __repr__(self):
        return f'Curve({self.grid!r}, norm={l2_norm(self):.6g})'


@dataclass(frozen=True, eq=False)
class CurveSet:
    """N curves on one grid, stored as an N x T matrix."""

    grid: TimeGrid
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim == 1:
            values = values.reshape(1, -1)
        if values.ndim != 2 or values.shape[1] != self.grid.size:
            raise DataError(f'curve matrix of shape {values.shape} does not match a grid of {self.grid.size} points')
        if not np.all(np.isfinite(values)):
            raise DataError('curve values must be finite')
        object.__setattr__(self, 'values', _frozen(values))

    @classmethod
    def from_curves(cls, curves):
        curves = list(curves)
        if not curves:
            raise DataError('cannot build a curve set from no curves')
        grid = curves[0].grid
        for curve in curves[1:]:
            grid.require_same(curve.grid)
        return cls(grid, np.vstack([c.values for c in curves]))

    def __len__(self):
        return self.values.shape[0]

    def __getitem__(self, index):
        return Curve(self.grid, self.values[index])

    def __iter__(self):
        for row in self.values:
            yield Curve(self.grid, row)

    def subset(self, rows):
        return CurveSet(self.grid, self.values[np.asarray(rows)])

    def mean(self):
        return Curve(self.grid, self.values.mean(axis=0))

    def sample_covariance(self, ddof=1):
        centered = self.values - self.values.mean(axis=0)
        divisor = max(len(self) - ddof, 1)
        return Kernel.from_outer_sum(self.grid, centered, divisor)

    def squared_norms(self):
        return (self.values ** 2) @ self.grid.weights


@dataclass(frozen=True, eq=False)
class Kernel:
    grid: TimeGrid
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        size = self.grid.size
        if values.shape != (size, size):
            raise InvalidKernel(f'kernel of shape {values.shape} does not match a grid of {size} points')
        if not np.all(np.isfinite(values)):
            raise InvalidKernel('kernel values must be finite')
        scale = max(1.0, float(np.max(np.abs(values))))
        if np.max(np.abs(values - values.T)) > SYMMETRY_RTOL * scale:
            raise InvalidKernel('kernel is not symmetric')
        if np.any(np.diag(values) < -SYMMETRY_RTOL * scale):
            raise InvalidKernel('kernel diagonal must be nonnegative')
        object.__setattr__(self, 'values', _frozen(values))

    @classmethod
    def from_function(cls, grid, func):
        t = grid.points
        return cls(grid, func(t[:, None], t[None, :]))

    @classmethod
    def from_outer_sum(cls, grid, rows, divisor):
        """(1/divisor) * sum_n rows[n] (x) rows[n], symmetrised exactly."""
        rows = np.asarray(rows, dtype=float)
        values = rows.T @ rows / float(divisor)
        return cls(grid, 0.5 * (values + values.T))

    @classmethod
    def outer(cls, f):
        return cls(f.grid, np.outer(f.values, f.values))

    def diagonal(self):
        return Curve(self.grid, np.diag(self.values))

    def trace(self):
        """Quadrature integral of the kernel diagonal."""
        return float(np.diag(self.values) @ self.grid.weights)

    def apply(self, f):
        self.grid.require_same(f.grid, 'kernel and curve')
        return Curve(self.grid, self.values @ (self.grid.weights * f.values))


def inner_product(f, g):
    f.grid.require_same(g.grid)
    return float(np.sum(f.grid.weights * f.values * g.values))


def l2_norm(f):
    return float(np.sqrt(max(inner_product(f, f), 0.0)))


def hilbert_schmidt_norm(kernel):
    """L2 norm of the kernel as a function on [0,1]^2 (the HS operator norm)."""
    w = kernel.grid.weights
    return float(np.sqrt(np.sum(np.outer(w, w) * kernel.values ** 2)))


def hilbert_schmidt_distance(k1, k2):
    k1.grid.require_same(k2.grid, 'kernels')
    w = k1.grid.weights
    return float(np.sqrt(np.sum(np.outer(w, w) * (k1.values - k2.values) ** 2)))
