"""
From sparse longitudinal records to curves on a common grid.

Steps, per call to ``smooth_subjects``:

1. Penalised B-spline fit of every subject at every lambda in the grid.
2. Lambda chosen by leave-one-subject-out CV: the mean of the other
   subjects' fits is scored against the held-out subject's raw points.
3. Mean, covariance and nugget estimated from the chosen fits. The
   covariance of the spline coefficients carries over to any grid, so the
   covariance kernel is B(t) Sigma_c B(s)^T.
4. Kriging refinement: each subject's curve is replaced by its conditional
   expectation given the raw observations. Every pass re-estimates the mean,
   covariance and nugget from the kriged coefficients.
"""

from __future__ import annotations

import logging
import math
from collections import OrderedDict
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from fnspace.grids import Curve, CurveSet, Kernel, TimeGrid
from funcscan_platform.errors import DataError, DomainError, SubjectTooSparse

from .splines import PenalizedSplineFit, SplineBasis, SplineConfig, solve_penalized

logger = logging.getLogger(__name__)

CV_TIE_RTOL = 1e-12
KRIGING_RTOL = 1e-12


@dataclass(frozen=True)
class LongitudinalRecord:
    subject_id: str
    time: float
    value: float

    def __post_init__(self):
        object.__setattr__(self, 'subject_id', str(self.subject_id))
        time, value = float(self.time), float(self.value)
        if not 0.0 <= time <= 1.0:
            raise DomainError(f'observation time {time} for subject {self.subject_id} is outside [0, 1]')
        if not math.isfinite(value):
            raise DataError(f'observation value for subject {self.subject_id} is not finite')
        object.__setattr__(self, 'time', time)
        object.__setattr__(self, 'value', value)


@dataclass(frozen=True)
class TimeScale:
    """Affine map between the study window [start, stop] and [0, 1]."""

    start: float = 0.0
    stop: float = 1.0

    def __post_init__(self):
        if not self.stop > self.start:
            raise DataError('the study window must have positive length')

    @classmethod
    def from_times(cls, times):
        times = np.asarray(times, dtype=float)
        return cls(float(times.min()), float(times.max()))

    def to_unit(self, times):
        return (np.asarray(times, dtype=float) - self.start) / (self.stop - self.start)

    def to_study(self, times):
        return self.start + np.asarray(times, dtype=float) * (self.stop - self.start)

    def as_dict(self):
        return {'start': self.start, 'stop': self.stop}


@dataclass(frozen=True, eq=False)
class SmoothedSample:
    grid: TimeGrid
    curves: CurveSet
    subject_ids: tuple
    chosen_lambda: float
    mean_curve: Curve
    covariance: Kernel
    nugget: float
    fits: tuple = field(default=(), repr=False)
    dropped: tuple = ()
    cv_scores: tuple = ()
    time_scale: TimeScale | None = None

    def __post_init__(self):
        if len(self.subject_ids) != len(self.curves):
            raise DataError('one subject id is needed per smoothed curve')
        if self.nugget < 0:
            raise DataError('nugget must be nonnegative')
        for other in (self.curves.grid, self.mean_curve.grid, self.covariance.grid):
            self.grid.require_same(other, 'smoothed sample components')

    def __len__(self):
        return len(self.curves)

    def subset(self, rows):
        rows = list(rows)
        return SmoothedSample(
            grid=self.grid,
            curves=self.curves.subset(rows),
            subject_ids=tuple(self.subject_ids[i] for i in rows),
            chosen_lambda=self.chosen_lambda,
            mean_curve=self.mean_curve,
            covariance=self.covariance,
            nugget=self.nugget,
            fits=tuple(self.fits[i] for i in rows) if self.fits else (),
            dropped=self.dropped,
            cv_scores=self.cv_scores,
            time_scale=self.time_scale,
        )


@dataclass(frozen=True, eq=False)
class _Subject:
    subject_id: str
    times: np.ndarray
    values: np.ndarray
    design: np.ndarray


def _group(records):
    grouped = OrderedDict()
    for record in records:
        grouped.setdefault(record.subject_id, []).append((record.time, record.value))
    return grouped


def _fit_all(subjects, penalty, smoothing):
    return np.vstack([
        solve_penalized(s.design.T @ s.design, s.design.T @ s.values, penalty, smoothing)
        for s in subjects
    ])


def _cv_score(subjects, coefficients):
    """Mean squared error of the leave-one-out mean fit at each held-out subject's raw times."""
    n = len(subjects)
    total = coefficients.sum(axis=0)
    squared, count = 0.0, 0
    for subject, own in zip(subjects, coefficients):
        others = (total - own) / (n - 1)
        residual = subject.values - subject.design @ others
        squared += float(residual @ residual)
        count += residual.size
    return squared / count


def _moments(subjects, coefficients):
    mean = coefficients.mean(axis=0)
    centered = coefficients - mean
    divisor = max(len(subjects) - 1, 1)
    nugget = float(np.mean([
        np.mean((s.values - s.design @ c) ** 2) for s, c in zip(subjects, coefficients)
    ]))
    return mean, centered, divisor, nugget


def _krige(subjects, mean, centered, divisor, nugget, floor):
    """Conditional expectation of every subject's coefficients given its raw points."""
    cov = centered.T @ centered / divisor
    cov = 0.5 * (cov + cov.T)
    refined = []
    for subject in subjects:
        cross = cov @ subject.design.T
        system = subject.design @ cross + nugget * np.eye(subject.values.size)
        gain = linalg.pinvh(0.5 * (system + system.T), atol=floor)
        refined.append(mean + cross @ (gain @ (subject.values - subject.design @ mean)))
    return np.vstack(refined)


def smooth_subjects(records, cfg=None, out_grid=None, *, time_scale=None):
    """Smooth every subject's raw observations onto ``out_grid``."""
    cfg = cfg or SplineConfig()
    out_grid = out_grid or TimeGrid.uniform(50)
    grouped = _group(records)
    if not grouped:
        raise DataError('no longitudinal records to smooth')

    sparse = [sid for sid, obs in grouped.items() if len(obs) < cfg.basis_order]
    if sparse:
        logger.warning(
            'dropping subjects with fewer observations than the basis order',
            extra={'dropped': len(sparse), 'basis_order': cfg.basis_order, 'subject_ids': sparse[:20]},
        )
    kept = OrderedDict((sid, obs) for sid, obs in grouped.items() if sid not in set(sparse))
    if not kept:
        raise SubjectTooSparse(
            f'every subject has fewer than {cfg.basis_order} observations', subject_ids=sparse,
        )

    max_obs = max(len(obs) for obs in kept.values())
    basis = SplineBasis(cfg.basis_order, cfg.knots_for(max_obs))
    penalty = basis.penalty(cfg.penalty_order)
    subjects = []
    for sid, obs in kept.items():
        times = np.array([t for t, _ in obs])
        values = np.array([v for _, v in obs])
        subjects.append(_Subject(sid, times, values, basis.evaluate(times)))

    scale = float(np.mean(np.concatenate([s.values for s in subjects]) ** 2))
    if len(subjects) == 1:
        chosen = cfg.lambda_grid[0]
        coefficients = _fit_all(subjects, penalty, chosen)
        scores = ()
    else:
        best_score = math.inf
        chosen = coefficients = None
        scores = []
        for smoothing in cfg.lambda_grid:
            candidate = _fit_all(subjects, penalty, smoothing)
            score = _cv_score(subjects, candidate)
            scores.append(score)
            # ties (within roundoff of the data scale) keep the smaller lambda
            if chosen is None or score < best_score - CV_TIE_RTOL * max(best_score, scale):
                best_score, chosen, coefficients = score, smoothing, candidate
        scores = tuple(scores)
    logger.info(
        'selected smoothing parameter by leave-one-subject-out CV',
        extra={'subjects': len(subjects), 'lambda': chosen, 'knots': basis.num_knots},
    )

    mean, centered, divisor, nugget = _moments(subjects, coefficients)
    floor = KRIGING_RTOL * max(scale, np.finfo(float).tiny)
    for _ in range(cfg.refinements):
        if cfg.fixed_nugget is not None:
            nugget = cfg.fixed_nugget
        coefficients = _krige(subjects, mean, centered, divisor, nugget, floor)
        mean, centered, divisor, nugget = _moments(subjects, coefficients)
    if cfg.fixed_nugget is not None:
        nugget = cfg.fixed_nugget

    out_basis = basis.evaluate(out_grid.points)
    curves = CurveSet(out_grid, coefficients @ out_basis.T)
    covariance = Kernel.from_outer_sum(out_grid, centered @ out_basis.T, divisor)
    return SmoothedSample(
        grid=out_grid,
        curves=curves,
        subject_ids=tuple(s.subject_id for s in subjects),
        chosen_lambda=float(chosen),
        mean_curve=Curve(out_grid, out_basis @ mean),
        covariance=covariance,
        nugget=max(float(nugget), 0.0),
        fits=tuple(PenalizedSplineFit(basis, c, float(chosen)) for c in coefficients),
        dropped=tuple(sparse),
        cv_scores=scores,
        time_scale=time_scale,
    )


def records_from_arrays(subject_ids, times, values):
    return [LongitudinalRecord(s, t, v) for s, t, v in zip(subject_ids, times, values)]
