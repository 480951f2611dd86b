"""
Tail probabilities of weighted sums of independent chi-square variables.

    Q = sum_i lambda_i * chi2_i(K)

``imhof_survival`` inverts the characteristic function of Q:

    P(Q > x) = 1/2 + (1/pi) * int_0^inf sin(theta(u)) / (u * rho(u)) du
    theta(u) = (K/2) * sum_i arctan(lambda_i u) - x u / 2
    rho(u)   = prod_i (1 + lambda_i^2 u^2)^(K/4)

Design:
- The integral is evaluated with QUADPACK (scipy.integrate.quad). A plain
  adaptive pass covers [0, A]; the tail [A, inf) is a Fourier integral in
  x/2 once sin(theta) is split into its cos(xu/2) and sin(xu/2) parts, which
  QAWF handles without chasing the oscillation.
- A is a few oscillation periods, cut short by Imhof's truncation bound
  whenever the integrand is already below the error target there.
- Distributions whose weights are all equal are a scaled chi-square and are
  answered exactly from scipy.stats.chi2.
- Callers get a SurvivalResult carrying the achieved error bound; a result
  that misses max(abs_tol, rel_tol * p) is flagged, logged, and returned.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate, stats

from funcscan_platform.conf import setting
from funcscan_platform.errors import DomainError, InvalidWeights

logger = logging.getLogger(__name__)

DEFAULT_ABS_TOL = 1e-12
DEFAULT_REL_TOL = 1e-3
DEFAULT_TRACE_FRACTION = 0.9999
DEFAULT_MAX_TERMS = 100

EQUAL_WEIGHT_RTOL = 1e-12
HEAD_PERIODS = 4
QUAD_LIMIT = 1000
QAWF_CYCLES = 500
MC_CHUNK = 200_000

METHOD_TRIVIAL = 'trivial'
METHOD_CHI2 = 'chi2'
METHOD_IMHOF = 'imhof'


@dataclass(frozen=True, eq=False)
class WeightedChiSq:
    weights: np.ndarray
    df: int = 1

    def __post_init__(self):
        weights = np.asarray(self.weights, dtype=float).ravel()
        if not np.all(np.isfinite(weights)):
            raise InvalidWeights('weights must be finite')
        if np.any(weights < 0):
            raise InvalidWeights('weights must be nonnegative')
        weights = np.sort(weights[weights > 0])[::-1]
        if weights.size == 0:
            raise InvalidWeights('a weighted chi-square needs at least one positive weight')
        if int(self.df) != self.df or self.df < 1:
            raise DomainError(f'degrees of freedom per term must be a positive integer, got {self.df}')
        weights.setflags(write=False)
        object.__setattr__(self, 'weights', weights)
        object.__setattr__(self, 'df', int(self.df))

    @property
    def terms(self):
        return self.weights.size

    @property
    def mean(self):
        return float(self.df * self.weights.sum())

    @property
    def is_scaled_chi2(self):
        return float(np.ptp(self.weights)) <= EQUAL_WEIGHT_RTOL * float(self.weights[0])

    def __repr__(self):
        return f'WeightedChiSq(terms={self.terms}, df={self.df}, leading={self.weights[0]:.4g})'


@dataclass(frozen=True)
class SurvivalResult:
    probability: float
    error_bound: float
    converged: bool
    method: str

    def __float__(self):
        return self.probability


def _phase(weights, df, u):
    return 0.5 * df * float(np.sum(np.arctan(weights * u)))


def _log_rho(weights, df, u):
    lu = weights * u
    return 0.25 * df * float(np.sum(np.log1p(lu * lu)))


def _truncation_point(weights, df, target):
    """Smallest U with Imhof's tail bound below ``target``.

    For u >= U, 1/(u rho(u)) <= u^(-1-k/2) / prod(lambda_i^(K/2)) with
    k = K * I, so the tail is at most 2 / (pi k U^(k/2) prod lambda_i^(K/2)).
    """
    k = df * weights.size
    log_u = (math.log(2.0 / (math.pi * k)) - 0.5 * df * float(np.sum(np.log(weights))) - math.log(target)) / (0.5 * k)
    return math.exp(min(log_u, 700.0))


def imhof_survival(dist, x, *, abs_tol=None, rel_tol=None):
    """P(dist > x) with a reported error bound."""
    abs_tol = setting('FUNCSCAN_IMHOF_ABS_TOL', DEFAULT_ABS_TOL) if abs_tol is None else abs_tol
    rel_tol = setting('FUNCSCAN_IMHOF_REL_TOL', DEFAULT_REL_TOL) if rel_tol is None else rel_tol
    x = float(x)
    if not math.isfinite(x) or x < 0:
        raise DomainError(f'survival is only defined for a finite x >= 0, got {x}')
    if x == 0:
        return SurvivalResult(1.0, 0.0, True, METHOD_TRIVIAL)

    weights, df = dist.weights, dist.df
    if dist.is_scaled_chi2:
        p = float(stats.chi2.sf(x / weights[0], df * weights.size))
        return SurvivalResult(p, 0.0, True, METHOD_CHI2)

    omega = 0.5 * x

    def head(u):
        if u == 0.0:
            return 0.5 * (df * float(np.sum(weights)) - x)
        return math.sin(_phase(weights, df, u) - omega * u) / (u * math.exp(_log_rho(weights, df, u)))

    def tail_cos(u):
        return math.sin(_phase(weights, df, u)) / (u * math.exp(_log_rho(weights, df, u)))

    def tail_sin(u):
        return -math.cos(_phase(weights, df, u)) / (u * math.exp(_log_rho(weights, df, u)))

    split = HEAD_PERIODS * 2.0 * math.pi / omega
    cutoff = _truncation_point(weights, df, abs_tol / 4.0)
    with warnings.catch_warnings():
        warnings.simplefilter('ignore', integrate.IntegrationWarning)
        if cutoff <= split:
            total, error = integrate.quad(head, 0.0, cutoff, epsabs=abs_tol / 4.0, epsrel=1e-12, limit=QUAD_LIMIT)
            error += abs_tol / 4.0
        else:
            total, error = integrate.quad(head, 0.0, split, epsabs=abs_tol / 4.0, epsrel=1e-12, limit=QUAD_LIMIT)
            for func, weight in ((tail_cos, 'cos'), (tail_sin, 'sin')):
                part, part_error = integrate.quad(
                    func, split, np.inf, weight=weight, wvar=omega,
                    epsabs=abs_tol / 4.0, limlst=QAWF_CYCLES, limit=QUAD_LIMIT,
                )
                total += part
                error += part_error

    p = min(max(0.5 + total / math.pi, 0.0), 1.0)
    bound = error / math.pi
    converged = bound <= max(abs_tol, rel_tol * p)
    if not converged:
        logger.warning(
            'Imhof integration did not reach the requested accuracy',
            extra={'p_value': p, 'error_bound': bound, 'terms': dist.terms, 'statistic': x},
        )
    return SurvivalResult(p, bound, converged, METHOD_IMHOF)


def mc_survival(dist, x, reps, seed):
    """Monte Carlo estimate of P(dist > x) from ``reps`` seeded draws."""
    reps = int(reps)
    if reps < 1:
        raise DomainError('reps must be at least 1')
    if x <= 0:
        return 1.0
    rng = np.random.default_rng(seed)
    exceed = 0
    remaining = reps
    while remaining:
        batch = min(remaining, MC_CHUNK)
        draws = rng.chisquare(dist.df, size=(batch, dist.terms)) @ dist.weights
        exceed += int(np.count_nonzero(draws > x))
        remaining -= batch
    return exceed / reps


def truncate_spectrum(eigenvalues, *, trace_fraction=None, max_terms=None):
    """Leading eigenvalues covering ``trace_fraction`` of the trace, capped at ``max_terms``."""
    trace_fraction = setting('FUNCSCAN_IMHOF_TRACE_FRACTION', DEFAULT_TRACE_FRACTION) if trace_fraction is None else trace_fraction
    max_terms = setting('FUNCSCAN_IMHOF_MAX_TERMS', DEFAULT_MAX_TERMS) if max_terms is None else max_terms
    values = np.sort(np.asarray(eigenvalues, dtype=float).ravel())[::-1]
    values = values[values > 0]
    if values.size == 0:
        return values
    cumulative = np.cumsum(values)
    keep = int(np.searchsorted(cumulative, trace_fraction * cumulative[-1] * (1 - 1e-15))) + 1
    return values[:min(keep, int(max_terms), values.size)]


def spectrum_pvalue(eigenvalues, df, statistic, **truncation):
    """p-value of ``statistic`` under sum(lambda_i chi2(df)) with the truncation policy applied.

    Returns (SurvivalResult, weights used).
    """
    weights = truncate_spectrum(eigenvalues, **truncation)
    if statistic <= 0:
        return SurvivalResult(1.0, 0.0, True, METHOD_TRIVIAL), weights
    if weights.size == 0:
        logger.warning(
            'null spectrum has no positive weights; reporting p = 0',
            extra={'statistic': statistic, 'df': df, 'eigenvalues': np.asarray(eigenvalues, dtype=float).size},
        )
        return SurvivalResult(0.0, 0.0, True, METHOD_TRIVIAL), weights
    return imhof_survival(WeightedChiSq(weights, df), statistic), weights
