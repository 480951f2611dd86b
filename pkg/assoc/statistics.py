"""
Association tests for the functional linear model.

Every test compares a null design (intercept and adjust columns) with the
full design (plus the K test columns):

- ``lambda_test``: Lambda, the drop in the residual sum of squared L2 norms,
  referred to sum_i lambda_i chi2_i(K) with lambda_i the eigenvalues of the
  full-model residual covariance.
- ``pc_test`` / ``pc_adaptive_test``: MANOVA of the test columns on the
  scores of the leading I eigenfunctions.
- ``weighted_test``: N * sum_i w_i R2_i for a weight rule on the components.
- ``mv_test``: MANOVA on the raw observed points.
- ``endpoint_test``: F-test on the change between the first and last grid
  points.

Per-component reductions are computed in score space. With Q an orthonormal
basis of the residualised test columns and S0 the null-model residual
scores, the reduction carried by component i is ||Q^T S0[:, i]||^2; these sum
to Lambda over a full eigenbasis.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field

import numpy as np
import statsmodels.api as sm
from statsmodels.multivariate.manova import MANOVA

from flm.design import ColumnRole
from flm.fitting import fit, residualized_test_basis
from fnspace.grids import CurveSet
from funcscan_platform.errors import DataError, InsufficientSamples, InvalidWeights, TooManyComponents
from qform.imhof import spectrum_pvalue

logger = logging.getLogger(__name__)

ADAPTIVE_COMPONENTS = (3, 4, 5)
WILKS = "Wilks' lambda"


class Method(str, enum.Enum):
    L2 = 'L2'
    PC = 'PC'
    PC_FIXED = 'PCfixed'
    WEIGHTED = 'Weighted'
    MV = 'MV'
    ENDPOINT = 'ENDPOINT'


@dataclass(frozen=True, eq=False)
class PcDiagnostics:
    eigenvalues: np.ndarray
    reductions: np.ndarray
    r_squared: np.ndarray
    sample_size: int
    projections: np.ndarray | None = None

    def __post_init__(self):
        if np.any(self.r_squared < 0):
            raise DataError('per-component R2 must be nonnegative')

    @property
    def components(self):
        return self.eigenvalues.size

    def standardized_reductions(self, count=None):
        """ReductionRSS_i / lambda_i, zero where lambda_i is zero."""
        count = self.components if count is None else count
        values = self.eigenvalues[:count]
        return np.divide(self.reductions[:count], values, out=np.zeros(count), where=values > 0)


@dataclass(frozen=True, eq=False)
class AssociationResult:
    statistic: float
    method: Method
    df_per_term: int
    truncation_I: int
    p_value: float
    weights_used: np.ndarray
    error_bound: float = 0.0
    converged: bool = True
    diagnostics: PcDiagnostics | None = None
    fit: object = field(default=None, repr=False)
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, 'p_value', min(max(float(self.p_value), 0.0), 1.0))
        object.__setattr__(self, 'statistic', float(self.statistic))
        object.__setattr__(self, 'weights_used', np.asarray(self.weights_used, dtype=float))
        object.__setattr__(self, 'truncation_I', max(int(self.truncation_I), 1))


@dataclass(frozen=True)
class WeightRule:
    kind: str
    components: int | None = None
    values: tuple | None = None

    EIGENVALUE = 'eigenvalue'
    INDICATOR = 'indicator'
    EXPLICIT = 'explicit'

    @classmethod
    def eigenvalue(cls):
        return cls(cls.EIGENVALUE)

    @classmethod
    def indicator(cls, components):
        if int(components) < 1:
            raise InvalidWeights('indicator weights need at least one component')
        return cls(cls.INDICATOR, components=int(components))

    @classmethod
    def explicit(cls, values):
        values = tuple(float(v) for v in np.ravel(values))
        if any(v < 0 or not np.isfinite(v) for v in values):
            raise InvalidWeights('weights must be finite and nonnegative')
        return cls(cls.EXPLICIT, values=values)

    @classmethod
    def coerce(cls, rule):
        if isinstance(rule, cls):
            return rule
        if isinstance(rule, str):
            if rule == cls.EIGENVALUE:
                return cls.eigenvalue()
            raise InvalidWeights(f'unknown weight rule {rule!r}')
        return cls.explicit(rule)

    def resolve(self, eigenvalues):
        size = eigenvalues.size
        if self.kind == self.EIGENVALUE:
            return np.array(eigenvalues, dtype=float)
        if self.kind == self.INDICATOR:
            if self.components > np.count_nonzero(eigenvalues > 0):
                raise TooManyComponents(
                    f'{self.components} components requested, only {np.count_nonzero(eigenvalues > 0)} positive eigenvalues'
                )
            weights = np.zeros(size)
            weights[:self.components] = 1.0
            return weights
        weights = np.zeros(size)
        values = np.asarray(self.values, dtype=float)
        if values.size > size:
            raise InvalidWeights(f'{values.size} weights for {size} components')
        weights[:values.size] = values
        return weights


def _require_test_columns(design):
    if design.test_count < 1:
        raise DataError('the design has no test columns')


def _nested_fits(curves, design, null_fit=None):
    _require_test_columns(design)
    if not isinstance(curves, CurveSet):
        raise DataError('association tests expect a CurveSet response')
    full = fit(curves, design)
    if null_fit is None:
        null_fit = fit(curves, design.null_design(), covariance=False, spectrum=False)
    elif null_fit.design.names != design.null_design().names or null_fit.design.rows != design.rows:
        raise DataError('the precomputed null fit does not match the design')
    return null_fit, full


def pc_diagnostics(null_fit, full_fit):
    """Per-component reductions and R2 against the full-model eigenfunctions."""
    spectrum = full_fit.spectrum
    q = residualized_test_basis(null_fit, full_fit.design.test_block())
    scores = spectrum.scores(null_fit.residuals)
    reductions = np.sum((q.T @ scores) ** 2, axis=0)
    n = full_fit.design.rows
    eigenvalues = spectrum.eigenvalues
    r_squared = np.divide(reductions, n * eigenvalues, out=np.zeros_like(reductions), where=eigenvalues > 0)
    projections = None
    if full_fit.design.test_count == 1:
        test_index = full_fit.design.indices(ColumnRole.TEST)[0]
        projections = spectrum.scores(full_fit.coefficients[test_index])[0]
    return PcDiagnostics(eigenvalues, reductions, r_squared, n, projections)


def _statistic_from_diagnostics(diagnostics, weights):
    """sum_i w_i * Reduction_i / lambda_i (= N sum_i w_i R2_i)."""
    return float(np.sum(weights * diagnostics.standardized_reductions()))


def lambda_test(curves, design, *, truncation=None, null_fit=None):
    """Lambda test of the design's test columns.

    ``null_fit`` may carry a precomputed fit of ``curves`` on the null design;
    the scan passes one so the covariates-only model is fitted once.
    """
    null, full = _nested_fits(curves, design, null_fit)
    diagnostics = pc_diagnostics(null, full)
    statistic = float(np.sum(diagnostics.reductions))
    survival, weights = spectrum_pvalue(full.spectrum.eigenvalues, design.test_count, statistic, **(truncation or {}))
    return AssociationResult(
        statistic=statistic,
        method=Method.L2,
        df_per_term=design.test_count,
        truncation_I=weights.size,
        p_value=survival.probability,
        weights_used=weights,
        error_bound=survival.error_bound,
        converged=survival.converged,
        diagnostics=diagnostics,
        fit=full,
        extra={'integration': survival.method},
    )


def _linear_hypothesis_pvalue(response, design):
    """Exact test of the test columns for one or more response columns.

    Returns (Wilks lambda, F value, p-value).
    """
    response = np.asarray(response, dtype=float)
    if response.ndim == 1:
        response = response.reshape(-1, 1)
    contrast = np.zeros((design.test_count, design.columns))
    for row, column in enumerate(design.indices(ColumnRole.TEST)):
        contrast[row, column] = 1.0
    k = design.test_count
    residual_df = design.rows - design.columns
    if response.shape[1] == 1:
        result = sm.OLS(response[:, 0], design.values).fit().f_test(contrast)
        f_value = float(np.squeeze(result.fvalue))
        wilks = 1.0 / (1.0 + f_value * k / residual_df)
        return wilks, f_value, float(np.squeeze(result.pvalue))
    manova = MANOVA(response, design.values)
    table = manova.mv_test([('test', contrast, None)]).results['test']['stat']
    return (
        float(table.loc[WILKS, 'Value']),
        float(table.loc[WILKS, 'F Value']),
        float(table.loc[WILKS, 'Pr > F']),
    )


def _pc_result(curves, design, full, diagnostics, components, method):
    positive = full.spectrum.positive_count
    if not 1 <= components <= positive:
        raise TooManyComponents(f'{components} components requested, only {positive} positive eigenvalues')
    scores = full.spectrum.scores(curves)[:, :components]
    wilks, f_value, p_value = _linear_hypothesis_pvalue(scores, design)
    statistic = float(np.sum(diagnostics.standardized_reductions(components)))
    return AssociationResult(
        statistic=statistic,
        method=method,
        df_per_term=design.test_count,
        truncation_I=components,
        p_value=p_value,
        weights_used=full.spectrum.eigenvalues[:components],
        diagnostics=diagnostics,
        fit=full,
        extra={'wilks': wilks, 'f_value': f_value},
    )


def pc_test(curves, design, components):
    """MANOVA of the test columns on the leading ``components`` PC scores."""
    null, full = _nested_fits(curves, design)
    diagnostics = pc_diagnostics(null, full)
    return _pc_result(curves, design, full, diagnostics, int(components), Method.PC_FIXED)


def pc_adaptive_test(curves, design, components=ADAPTIVE_COMPONENTS):
    """Largest PC-test p-value over the candidate component counts."""
    null, full = _nested_fits(curves, design)
    diagnostics = pc_diagnostics(null, full)
    feasible = [c for c in components if c <= full.spectrum.positive_count]
    if not feasible:
        raise TooManyComponents(
            f'no candidate component count in {tuple(components)} fits {full.spectrum.positive_count} positive eigenvalues'
        )
    results = [_pc_result(curves, design, full, diagnostics, c, Method.PC) for c in feasible]
    chosen = max(results, key=lambda r: r.p_value)
    chosen.extra['candidates'] = {r.truncation_I: r.p_value for r in results}
    return chosen


def weighted_test(curves, design, rule):
    """N * sum_i w(i) R2_i with a p-value from sum_i w(i) chi2_i(K)."""
    rule = WeightRule.coerce(rule)
    null, full = _nested_fits(curves, design)
    diagnostics = pc_diagnostics(null, full)
    weights = rule.resolve(diagnostics.eigenvalues)
    k = design.test_count
    if rule.kind == WeightRule.EIGENVALUE:
        statistic = float(np.sum(diagnostics.reductions))
        survival, used = spectrum_pvalue(diagnostics.eigenvalues, k, statistic)
    else:
        weights = np.where(diagnostics.eigenvalues > 0, weights, 0.0)
        statistic = _statistic_from_diagnostics(diagnostics, weights)
        active = weights[weights > 0]
        survival, used = spectrum_pvalue(active, k, statistic, trace_fraction=1.0, max_terms=max(active.size, 1))
    return AssociationResult(
        statistic=statistic,
        method=Method.WEIGHTED,
        df_per_term=k,
        truncation_I=int(np.count_nonzero(weights > 0)),
        p_value=survival.probability,
        weights_used=used,
        error_bound=survival.error_bound,
        converged=survival.converged,
        diagnostics=diagnostics,
        fit=full,
        extra={'rule': rule.kind},
    )


def mv_test(points, design):
    """Classical MANOVA (Wilks) of the test columns on raw observed points."""
    _require_test_columns(design)
    points = np.asarray(points, dtype=float)
    if points.ndim == 1:
        points = points.reshape(-1, 1)
    if points.shape[0] != design.rows:
        raise DataError(f'{points.shape[0]} response rows for {design.rows} design rows')
    if points.shape[1] >= design.rows - design.columns:
        raise InsufficientSamples(
            f'{points.shape[1]} response points need more than {points.shape[1] + design.columns} subjects'
        )
    wilks, f_value, p_value = _linear_hypothesis_pvalue(points, design)
    return AssociationResult(
        statistic=wilks,
        method=Method.MV,
        df_per_term=design.test_count,
        truncation_I=points.shape[1],
        p_value=p_value,
        weights_used=np.empty(0),
        extra={'f_value': f_value},
    )


def endpoint_test(curves, design):
    """F-test of the test columns on Y(t_last) - Y(t_first)."""
    _require_test_columns(design)
    change = curves.values[:, -1] - curves.values[:, 0]
    if change.size != design.rows:
        raise DataError(f'{change.size} curves for {design.rows} design rows')
    _, f_value, p_value = _linear_hypothesis_pvalue(change, design)
    return AssociationResult(
        statistic=f_value,
        method=Method.ENDPOINT,
        df_per_term=design.test_count,
        truncation_I=1,
        p_value=p_value,
        weights_used=np.empty(0),
    )


def shared_null_lambda_test(null_fit, test_columns, *, truncation=None):
    """Lambda test against a precomputed covariates-only fit and its spectrum."""
    q = residualized_test_basis(null_fit, test_columns)
    projected = q.T @ null_fit.residuals
    statistic = float(np.sum((projected ** 2) @ null_fit.grid.weights))
    k = q.shape[1]
    survival, weights = spectrum_pvalue(null_fit.spectrum.eigenvalues, k, statistic, **(truncation or {}))
    return AssociationResult(
        statistic=statistic,
        method=Method.L2,
        df_per_term=k,
        truncation_I=weights.size,
        p_value=survival.probability,
        weights_used=weights,
        error_bound=survival.error_bound,
        converged=survival.converged,
        extra={'null_spectrum': 'shared'},
    )
