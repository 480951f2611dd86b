"""
Power study and per-PC R2 profiles for the simulated SNP model.

A replicate draws N Matérn error curves sampled at M points on the even
grid [1/M, 1], adds snp_n * beta(t) for a centred Binomial(2, maf) SNP,
rebuilds the curves with the smoothing pipeline and runs every method on the
same data. Rejections are aggregated per method in replicate order, so the
table is the same for any number of worker threads.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

import numpy as np
import pandas as pd
from joblib import Parallel, delayed

from assoc.statistics import ADAPTIVE_COMPONENTS, lambda_test, mv_test, pc_adaptive_test, pc_diagnostics, pc_test
from flm.design import DesignMatrix
from flm.fitting import fit
from fnspace.grids import CurveSet, Kernel, TimeGrid
from fnspace.spectral import eigendecompose
from funcscan_platform.conf import setting
from funcscan_platform.errors import DataError, FuncScanError
from smoothing.pipeline import records_from_arrays, smooth_subjects
from smoothing.splines import SplineConfig

from .matern import MaternSpec, covariance_matrix, draw_error_curves
from .rng import ROLE_ERRORS, ROLE_GENOTYPE, substream
from .signals import SIGNAL_KINDS, draw_snp, signal_curve, signal_values

logger = logging.getLogger(__name__)

METHOD_L2 = 'L2'
METHOD_PC = 'PC'
METHOD_PC5 = 'PC5'
METHOD_MV = 'MV'
POWER_METHODS = (METHOD_L2, METHOD_PC, METHOD_PC5, METHOD_MV)
POWER_COLUMNS = ('method', 'M', 'signal', 'power', 'se', 'reps', 'seed')
SAMPLING_SIZES = (5, 10, 20, 50)
RECONSTRUCTION_GRID = 50
PROFILE_COMPONENTS = 10


@dataclass(frozen=True)
class PowerScenario:
    signal: str = 'normcdf'
    n: int = 200
    m: int = 10
    reps: int = 1000
    alpha: float = 0.05
    seed: int = 0
    maf: float = 0.5
    effect_scale: float = 1.0
    error: MaternSpec = field(default_factory=MaternSpec)
    threads: int | None = None

    def __post_init__(self):
        if self.signal not in SIGNAL_KINDS:
            raise DataError(f'unknown signal {self.signal!r}; expected one of {", ".join(SIGNAL_KINDS)}')
        if self.m < 2:
            raise DataError('need at least 2 sampled points per curve')
        if self.n < 10:
            raise DataError('need at least 10 subjects')
        if self.reps < 1:
            raise DataError('need at least one replicate')
        if not 0 < self.alpha < 1:
            raise DataError(f'alpha must lie in (0, 1), got {self.alpha}')

    @property
    def sampling_grid(self):
        return TimeGrid(np.linspace(1.0 / self.m, 1.0, self.m))

    @property
    def worker_count(self):
        return self.threads or setting('FUNCSCAN_SCAN_THREADS', 1)

    def effect(self, points):
        return self.effect_scale * signal_values(self.signal, points)


def simulate_replicate(scenario, replicate):
    """(sampled points N x M, centred SNP) for one replicate."""
    grid = scenario.sampling_grid
    errors = draw_error_curves(grid, scenario.error, scenario.n, substream(scenario.seed, replicate, ROLE_ERRORS))
    snp = draw_snp(scenario.n, scenario.maf, substream(scenario.seed, replicate, ROLE_GENOTYPE))
    return errors.values + np.outer(snp, scenario.effect(grid.points)), snp


def reconstruct(points, sampling_grid, out_grid=None):
    """Smooth every row of ``points`` (observed at ``sampling_grid``) onto ``out_grid``."""
    n, m = points.shape
    subject_ids = np.repeat([f's{i}' for i in range(n)], m)
    times = np.tile(sampling_grid.points, n)
    records = records_from_arrays(subject_ids, times, points.ravel())
    return smooth_subjects(records, SplineConfig(), out_grid or TimeGrid.uniform(RECONSTRUCTION_GRID)).curves


def _p_value(method, test, *args):
    try:
        return test(*args).p_value
    except FuncScanError as exc:
        logger.warning('power replicate failed; counted as not rejected', extra={'method': method, 'error': str(exc)})
        return 1.0


def _replicate_p_values(scenario, replicate):
    points, snp = simulate_replicate(scenario, replicate)
    curves = reconstruct(points, scenario.sampling_grid)
    design = DesignMatrix.build(test={'snp': snp})
    return {
        METHOD_L2: _p_value(METHOD_L2, lambda_test, curves, design),
        METHOD_PC: _p_value(METHOD_PC, pc_adaptive_test, curves, design, ADAPTIVE_COMPONENTS),
        METHOD_PC5: _p_value(METHOD_PC5, pc_test, curves, design, 5),
        METHOD_MV: _p_value(METHOD_MV, mv_test, points, design),
    }


def run_power_study(scenario):
    """Rejection rate at ``alpha`` per method, with binomial standard errors."""
    started = time.monotonic()
    pool = Parallel(n_jobs=scenario.worker_count, prefer='threads', return_as='generator')
    rejections = dict.fromkeys(POWER_METHODS, 0)
    for p_values in pool(delayed(_replicate_p_values)(scenario, r) for r in range(scenario.reps)):
        for method, p in p_values.items():
            rejections[method] += p < scenario.alpha
    rows = []
    for method in POWER_METHODS:
        power = rejections[method] / scenario.reps
        rows.append({
            'method': method,
            'M': scenario.m,
            'signal': scenario.signal,
            'power': power,
            'se': float(np.sqrt(power * (1.0 - power) / scenario.reps)),
            'reps': scenario.reps,
            'seed': scenario.seed,
        })
    logger.info('power study finished', extra={
        'signal': scenario.signal, 'm': scenario.m, 'n': scenario.n, 'reps': scenario.reps,
        'seconds': round(time.monotonic() - started, 3),
    })
    return pd.DataFrame(rows, columns=list(POWER_COLUMNS))


def _replicate_r2(scenario, grid, replicate, components):
    errors = draw_error_curves(grid, scenario.error, scenario.n, substream(scenario.seed, replicate, ROLE_ERRORS))
    snp = draw_snp(scenario.n, scenario.maf, substream(scenario.seed, replicate, ROLE_GENOTYPE))
    curves = CurveSet(grid, errors.values + np.outer(snp, scenario.effect(grid.points)))
    design = DesignMatrix.build(test={'snp': snp})
    full = fit(curves, design)
    null = fit(curves, design.null_design(), covariance=False, spectrum=False)
    return pc_diagnostics(null, full).r_squared[:components]


def r2_profile(scenario, components=PROFILE_COMPONENTS, grid_size=RECONSTRUCTION_GRID):
    """Mean per-PC R2 over replicates of fully observed curves."""
    grid = TimeGrid.uniform(grid_size)
    components = min(int(components), grid.size)
    pool = Parallel(n_jobs=scenario.worker_count, prefer='threads', return_as='generator')
    draws = np.vstack(list(pool(
        delayed(_replicate_r2)(scenario, grid, r, components) for r in range(scenario.reps)
    )))
    se = draws.std(axis=0, ddof=1) / np.sqrt(draws.shape[0]) if draws.shape[0] > 1 else np.zeros(components)
    return pd.DataFrame({
        'component': np.arange(1, components + 1),
        'r_squared': draws.mean(axis=0),
        'se': se,
        'signal': scenario.signal,
        'n': scenario.n,
        'reps': scenario.reps,
    })


def theoretical_r2_profile(signal, spec=None, grid=None, second_moment=0.5, components=PROFILE_COMPONENTS):
    """E[X^2] <beta, v_i>^2 / lambda_i from the Matérn eigenpairs."""
    spec = spec or MaternSpec()
    grid = TimeGrid.uniform(RECONSTRUCTION_GRID) if grid is None else grid
    spectrum = eigendecompose(Kernel(grid, covariance_matrix(grid, spec)), min(components, grid.size))
    projections = spectrum.scores(signal_curve(signal, grid).values)[0]
    eigenvalues = spectrum.eigenvalues
    return np.divide(
        second_moment * projections ** 2, eigenvalues,
        out=np.zeros_like(eigenvalues), where=eigenvalues > 0,
    )


def write_power_table(path, table):
    table = table.loc[:, list(POWER_COLUMNS)]
    table.to_csv(path, sep='\t', index=False, float_format='%.6g')
    return path


def plot_power_table(path, table):
    """Power against M, one line per (signal, method)."""
    import matplotlib
    matplotlib.use('Agg')
    import matplotlib.pyplot as plt

    signals = list(dict.fromkeys(table['signal']))
    fig, axes = plt.subplots(1, len(signals), figsize=(4 * len(signals), 3.5), squeeze=False)
    for ax, signal in zip(axes[0], signals):
        subset = table[table['signal'] == signal]
        for method, rows in subset.groupby('method', sort=False):
            rows = rows.sort_values('M')
            ax.errorbar(rows['M'], rows['power'], yerr=2 * rows['se'], marker='o', capsize=3, label=method)
        ax.set_title(signal)
        ax.set_xlabel('points per curve (M)')
        ax.set_ylim(0, 1)
    axes[0][0].set_ylabel('power')
    axes[0][-1].legend(loc='best', fontsize='small')
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def simulation_frames(scenario, replicate=0):
    """Long-format observations and a subject_id/snp covariate table for one replicate."""
    points, snp = simulate_replicate(scenario, replicate)
    subject_ids = [f's{i:05d}' for i in range(scenario.n)]
    m = scenario.m
    observations = pd.DataFrame({
        'subject_id': np.repeat(subject_ids, m),
        'time': np.tile(scenario.sampling_grid.points, scenario.n),
        'value': points.ravel(),
    })
    covariates = pd.DataFrame({'subject_id': subject_ids, 'snp': snp})
    return observations, covariates
