"""
Monte Carlo check of the Lambda drift under a fixed alternative.

Under a nonzero effect, Lambda / N converges to

    int beta_2(t)^T S beta_2(t) dt,   S = Sigma_22 - Sigma_21 Sigma_11^-1 Sigma_12

with Sigma the population second-moment matrix of the design (intercept
included) and block 2 the test columns. For a single centred SNP column this
is E[X^2] ||beta||^2.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from flm.design import DesignMatrix
from flm.fitting import fit, reduction_statistic, schur_complement
from fnspace.grids import CurveSet, TimeGrid
from funcscan_platform.errors import DataError
from simgen.matern import MaternSpec, cholesky_with_jitter, covariance_matrix
from simgen.rng import ROLE_COVARIATE, ROLE_ERRORS, make_rng
from simgen.signals import signal_curve

logger = logging.getLogger(__name__)

MODEL_SNP = 'snp'
MODEL_CORRELATED = 'correlated'


@dataclass(frozen=True)
class DriftConfig:
    model: str = MODEL_SNP
    signals: tuple = ('normcdf',)
    effect_scale: float = 1.0
    maf: float = 0.5
    correlations: tuple = (0.6, -0.3)
    sample_sizes: tuple = (500, 5000)
    reps: int = 200
    grid_size: int = 50
    error: MaternSpec = field(default_factory=MaternSpec)
    seed: int = 0

    def __post_init__(self):
        if self.model not in (MODEL_SNP, MODEL_CORRELATED):
            raise DataError(f'unknown drift model {self.model!r}')
        if self.model == MODEL_SNP and len(self.signals) != 1:
            raise DataError('the snp model takes exactly one signal')
        if self.model == MODEL_CORRELATED and len(self.signals) != len(self.correlations):
            raise DataError('the correlated model needs one signal per correlated test column')
        if any(abs(r) >= 1 for r in self.correlations):
            raise DataError('correlations must lie strictly inside (-1, 1)')
        if self.reps < 1 or not self.sample_sizes:
            raise DataError('need at least one replicate and one sample size')

    @property
    def test_count(self):
        return len(self.signals)

    def population_second_moment(self):
        """Sigma_X with columns (intercept, [adjust], test...)."""
        if self.model == MODEL_SNP:
            return np.diag([1.0, 2.0 * self.maf * (1.0 - self.maf)])
        rho = np.asarray(self.correlations, dtype=float)
        size = 2 + rho.size
        sigma = np.zeros((size, size))
        sigma[0, 0] = 1.0
        sigma[1, 1] = 1.0
        sigma[1, 2:] = sigma[2:, 1] = rho
        sigma[2:, 2:] = np.outer(rho, rho)
        np.fill_diagonal(sigma[2:, 2:], 1.0)
        return sigma

    @property
    def leading_block(self):
        return 1 if self.model == MODEL_SNP else 2


@dataclass(frozen=True, eq=False)
class DriftReport:
    expected: float
    observed: dict
    standard_errors: dict
    brute_force: dict

    def relative_error(self, n):
        if self.expected == 0:
            return abs(self.observed[n])
        return abs(self.observed[n] - self.expected) / self.expected

    def as_rows(self):
        return [
            {'n': n, 'expected': self.expected, 'observed': self.observed[n],
             'se': self.standard_errors[n], 'brute_force': self.brute_force[n]}
            for n in sorted(self.observed)
        ]


def _signal_matrix(config, grid):
    return np.vstack([config.effect_scale * signal_curve(kind, grid).values for kind in config.signals])


def expected_drift(config, grid):
    """int beta^T S beta over the grid, S the population Schur complement."""
    betas = _signal_matrix(config, grid)
    schur = schur_complement(config.population_second_moment(), config.leading_block)
    gram = betas @ (betas * grid.weights).T
    return float(np.sum(schur * gram))


def _draw_design(config, n, rng):
    if config.model == MODEL_SNP:
        snp = rng.binomial(2, config.maf, size=n) - 2.0 * config.maf
        return DesignMatrix.build(test={'snp': snp})
    z = rng.standard_normal(n)
    test = {}
    for index, rho in enumerate(config.correlations):
        test[f'x{index + 1}'] = rho * z + np.sqrt(1.0 - rho * rho) * rng.standard_normal(n)
    return DesignMatrix.build(adjust={'z': z}, test=test)


def _residualized_drift(design, betas, grid):
    """Brute force: regress the test block on the null design and integrate beta^T S_hat beta."""
    x1 = design.null_design().values
    x2 = design.test_block()
    residual = x2 - x1 @ np.linalg.lstsq(x1, x2, rcond=None)[0]
    schur = residual.T @ residual / design.rows
    return float(np.sum(schur * (betas @ (betas * grid.weights).T)))


def alternative_drift_check(config=None):
    """Mean Lambda / N over seeded replicates at each sample size, against the closed form."""
    config = config or DriftConfig()
    grid = TimeGrid.uniform(config.grid_size)
    betas = _signal_matrix(config, grid)
    factor = cholesky_with_jitter(covariance_matrix(grid, config.error))
    expected = expected_drift(config, grid)

    observed, errors, brute = {}, {}, {}
    for n in config.sample_sizes:
        ratios, oracle = [], []
        for replicate in range(config.reps):
            design = _draw_design(config, n, make_rng((config.seed, n, replicate, ROLE_COVARIATE)))
            noise = make_rng((config.seed, n, replicate, ROLE_ERRORS)).standard_normal((n, grid.size))
            values = config.error.mean + noise @ factor.T + design.test_block() @ betas
            curves = CurveSet(grid, values)
            null = fit(curves, design.null_design(), covariance=False, spectrum=False)
            ratios.append(reduction_statistic(null, design.test_block()) / n)
            oracle.append(_residualized_drift(design, betas, grid))
        observed[n] = float(np.mean(ratios))
        errors[n] = float(np.std(ratios, ddof=1) / np.sqrt(len(ratios))) if len(ratios) > 1 else 0.0
        brute[n] = float(np.mean(oracle))
        logger.info('drift check finished sample size', extra={
            'n': n, 'observed': observed[n], 'expected': expected, 'reps': config.reps,
        })
    return DriftReport(expected, observed, errors, brute)

