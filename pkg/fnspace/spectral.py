"""
Spectral decomposition of covariance kernels.

The integral operator ``(K f)(t) = int K(t, s) f(s) ds`` is discretised as
``K W`` with W the diagonal of quadrature weights. Its eigenpairs are taken
from the symmetric matrix ``W^1/2 K W^1/2`` and mapped back with ``W^-1/2``,
which makes the eigenfunctions orthonormal in the quadrature inner product
rather than as plain vectors.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from funcscan_platform.errors import DataError, InvalidKernel

from .grids import Curve, CurveSet, TimeGrid, _frozen

logger = logging.getLogger(__name__)

NEGATIVE_EIGENVALUE_RTOL = 1e-10


@dataclass(frozen=True, eq=False)
class EigenSpectrum:
    """Descending nonnegative eigenvalues, optionally with eigenfunctions (I x T)."""

    eigenvalues: np.ndarray
    grid: TimeGrid | None = None
    eigenfunctions: np.ndarray | None = None

    def __post_init__(self):
        values = np.asarray(self.eigenvalues, dtype=float).ravel()
        if np.any(values < 0) or np.any(np.diff(values) > 0):
            raise DataError('eigenvalues must be nonnegative and sorted in descending order')
        object.__setattr__(self, 'eigenvalues', _frozen(values))
        if self.eigenfunctions is not None:
            functions = np.atleast_2d(np.asarray(self.eigenfunctions, dtype=float))
            if self.grid is None or functions.shape != (values.size, self.grid.size):
                raise DataError('eigenfunctions must be an (I x T) matrix on the spectrum grid')
            object.__setattr__(self, 'eigenfunctions', _frozen(functions))

    def __len__(self):
        return self.eigenvalues.size

    @property
    def positive_count(self):
        return int(np.count_nonzero(self.eigenvalues > 0))

    def curves(self):
        self._require_functions()
        return [Curve(self.grid, row) for row in self.eigenfunctions]

    def truncated(self, count):
        count = int(count)
        functions = None if self.eigenfunctions is None else self.eigenfunctions[:count]
        return EigenSpectrum(self.eigenvalues[:count], self.grid, functions)

    def scores(self, curves):
        """<Y_n, v_i> for every curve n and eigenfunction i, as an N x I matrix."""
        self._require_functions()
        if isinstance(curves, CurveSet):
            self.grid.require_same(curves.grid)
            values = curves.values
        else:
            values = np.atleast_2d(np.asarray(curves, dtype=float))
        return (values * self.grid.weights) @ self.eigenfunctions.T

    def _require_functions(self):
        if self.eigenfunctions is None:
            raise DataError('this spectrum was computed without eigenfunctions')


def eigendecompose(kernel, max_components=None, *, with_functions=True):
    """Quadrature-weighted eigendecomposition of a covariance kernel."""
    size = kernel.grid.size
    if max_components is None:
        max_components = size
    max_components = int(max_components)
    if not 1 <= max_components <= size:
        raise InvalidKernel(f'max_components must be between 1 and {size}, got {max_components}')

    root_w = np.sqrt(kernel.grid.weights)
    weighted = root_w[:, None] * kernel.values * root_w[None, :]
    weighted = 0.5 * (weighted + weighted.T)

    subset = None if max_components == size else [size - max_components, size - 1]
    if with_functions:
        values, vectors = linalg.eigh(weighted, subset_by_index=subset)
    else:
        values = linalg.eigh(weighted, eigvals_only=True, subset_by_index=subset)
        vectors = None

    order = np.argsort(values)[::-1]
    values = values[order]
    leading = max(float(values[0]), 0.0)
    if np.any(values < -NEGATIVE_EIGENVALUE_RTOL * leading):
        logger.warning(
            'kernel is not positive semidefinite; clamping negative eigenvalues',
            extra={'min_eigenvalue': float(values.min()), 'max_eigenvalue': leading},
        )
    values = np.clip(values, 0.0, None)
    if vectors is None:
        return EigenSpectrum(values, kernel.grid)

    functions = (vectors[:, order] / root_w[:, None]).T
    # sign convention: the largest-magnitude entry of each eigenfunction is positive
    pivots = np.argmax(np.abs(functions), axis=1)
    signs = np.sign(functions[np.arange(functions.shape[0]), pivots])
    signs[signs == 0] = 1.0
    functions = functions * signs[:, None]
    return EigenSpectrum(values, kernel.grid, functions)
