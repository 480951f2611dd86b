"""
Pointwise least squares for the functional linear model

    Y_n(t) = X_n^T beta(t) + eps_n(t)

The normal equations share one matrix X^T X at every grid point, so a single
Cholesky factorisation solves for all of beta(t) at once. The residual
covariance uses the divisor N - P (P design columns, intercept included),
and its quadrature-weighted spectrum supplies the null weights of the tests.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from fnspace.grids import Curve, CurveSet, Kernel, TimeGrid
from fnspace.spectral import EigenSpectrum, eigendecompose
from funcscan_platform.errors import DataError, RankDeficient, SingularBlock

from .design import DesignMatrix

logger = logging.getLogger(__name__)

RCOND_THRESHOLD = 1e-12


@dataclass(frozen=True, eq=False)
class FunctionalFit:
    design: DesignMatrix
    grid: TimeGrid
    coefficients: np.ndarray   # P x T
    residuals: np.ndarray      # N x T
    gram_inverse: np.ndarray   # (X^T X)^-1
    dof_divisor: int
    residual_cov: Kernel | None = None
    spectrum: EigenSpectrum | None = None

    def coefficient(self, name):
        return Curve(self.grid, self.coefficients[self.design.names.index(name)])

    def coefficient_curves(self):
        return {name: Curve(self.grid, row) for name, row in zip(self.design.names, self.coefficients)}

    @property
    def residual_curves(self):
        return CurveSet(self.grid, self.residuals)

    def residual_norms(self):
        """||r_n||^2 for every subject."""
        return (self.residuals ** 2) @ self.grid.weights

    @property
    def residual_sum_of_norms(self):
        return float(np.sum(self.residual_norms()))

    def standard_errors(self):
        """Pointwise SE(t) of each coefficient curve, P x T."""
        if self.residual_cov is None:
            raise DataError('standard errors need the residual covariance; refit with covariance=True')
        variance = np.clip(np.diag(self.residual_cov.values), 0.0, None)
        return np.sqrt(np.outer(np.clip(np.diag(self.gram_inverse), 0.0, None), variance))


def _dependent_columns(values, names):
    norms = np.linalg.norm(values, axis=0)
    scaled = values / np.where(norms > 0, norms, 1.0)
    _, r, pivots = linalg.qr(scaled, mode='economic', pivoting=True)
    diag = np.abs(np.diag(r))
    rank = int(np.count_nonzero(diag > np.sqrt(RCOND_THRESHOLD) * max(diag[0], 1e-300)))
    rank = min(rank, values.shape[1] - 1)
    dependent = [names[i] for i in pivots[rank:]]
    zero = [names[i] for i in np.flatnonzero(norms == 0)]
    return sorted(set(dependent) | set(zero), key=names.index)


def check_rank(design):
    """Raise RankDeficient when X^T X is numerically singular (column-equilibrated)."""
    if design.columns == 0:
        return
    gram = design.values.T @ design.values
    scale = np.sqrt(np.diag(gram))
    if np.any(scale == 0):
        rcond = 0.0
    else:
        equilibrated = gram / np.outer(scale, scale)
        eigenvalues = np.linalg.eigvalsh(equilibrated)
        rcond = max(eigenvalues[0], 0.0) / eigenvalues[-1]
    if rcond < RCOND_THRESHOLD:
        columns = _dependent_columns(design.values, design.names)
        raise RankDeficient(
            f'design is rank deficient (rcond={rcond:.2e}); dependent columns: {", ".join(columns)}',
            columns=columns,
        )


def fit(curves, design, *, covariance=True, spectrum=True, max_components=None):
    """Least squares fit of every design column's coefficient curve."""
    if not isinstance(curves, CurveSet):
        raise DataError('fit expects a CurveSet response')
    if len(curves) != design.rows:
        raise DataError(f'{len(curves)} response curves for {design.rows} design rows')
    check_rank(design)

    x = design.values
    y = curves.values
    p = design.columns
    if p:
        factor = linalg.cho_factor(x.T @ x, lower=True)
        coefficients = linalg.cho_solve(factor, x.T @ y)
        gram_inverse = linalg.cho_solve(factor, np.eye(p))
        residuals = y - x @ coefficients
    else:
        coefficients = np.zeros((0, curves.grid.size))
        gram_inverse = np.zeros((0, 0))
        residuals = y.copy()
    divisor = design.rows - p

    residual_cov = eigen = None
    if covariance or spectrum:
        residual_cov = Kernel.from_outer_sum(curves.grid, residuals, divisor)
    if spectrum:
        eigen = eigendecompose(residual_cov, max_components)

    residuals.setflags(write=False)
    coefficients.setflags(write=False)
    return FunctionalFit(
        design=design,
        grid=curves.grid,
        coefficients=coefficients,
        residuals=residuals,
        gram_inverse=gram_inverse,
        dof_divisor=divisor,
        residual_cov=residual_cov,
        spectrum=eigen,
    )


def residualized_test_basis(null_fit, test_columns):
    """Orthonormal basis Q of the test columns residualised on the null design."""
    z = np.asarray(test_columns, dtype=float).reshape(null_fit.design.rows, -1)
    x1 = null_fit.design.values
    if x1.shape[1]:
        z_res = z - x1 @ (null_fit.gram_inverse @ (x1.T @ z))
    else:
        z_res = z
    q, r = linalg.qr(z_res, mode='economic')
    reference = np.linalg.norm(z, axis=0)
    if np.any(np.abs(np.diag(r)) <= np.sqrt(RCOND_THRESHOLD) * np.maximum(reference, 1e-300)):
        raise RankDeficient('test columns are collinear with the null design')
    return q


def reduction_statistic(null_fit, test_columns):
    """Drop in residual sum of squared norms from adding ``test_columns`` to ``null_fit``.

    Frisch-Waugh form: the drop is sum_t w_t ||Q^T R0(t)||^2. Raises
    RankDeficient when the test columns add no new direction.
    """
    projected = residualized_test_basis(null_fit, test_columns).T @ null_fit.residuals
    return float(np.sum((projected ** 2) @ null_fit.grid.weights))


def schur_complement(sigma, leading):
    """Sigma22 - Sigma21 Sigma11^-1 Sigma12 for the leading ``leading`` x ``leading`` block."""
    sigma = np.asarray(sigma, dtype=float)
    if sigma.ndim != 2 or sigma.shape[0] != sigma.shape[1]:
        raise DataError('sigma must be a square matrix')
    leading = int(leading)
    if not 0 < leading < sigma.shape[0]:
        raise DataError(f'partition {leading} does not split a {sigma.shape[0]}x{sigma.shape[0]} matrix')
    if not np.allclose(sigma, sigma.T, rtol=1e-10, atol=1e-12):
        raise DataError('sigma must be symmetric')
    s11 = sigma[:leading, :leading]
    s12 = sigma[:leading, leading:]
    s22 = sigma[leading:, leading:]
    if np.linalg.cond(s11) > 1.0 / RCOND_THRESHOLD:
        raise SingularBlock('the leading block is numerically singular')
    try:
        solved = linalg.solve(s11, s12, assume_a='sym')
    except linalg.LinAlgError as exc:
        raise SingularBlock('the leading block is singular') from exc
    complement = s22 - s12.T @ solved
    return 0.5 * (complement + complement.T)
