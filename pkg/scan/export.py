"""
Manhattan and QQ tables for scan results, plus the interaction band file.
"""

import logging
import sys
from pathlib import Path

import numpy as np
import pandas as pd

from funcscan_platform.errors import DataError

logger = logging.getLogger(__name__)

SMALLEST_P = sys.float_info.min
GENOME_WIDE = 5e-8
SCORE_FLOAT_FORMAT = '%.6f'
MANHATTAN_COLUMNS = ('snp_id', 'chromosome', 'position', 'neg_log10_p')


def neg_log10(p_values):
    """-log10 p with p floored at the smallest positive double; p = 1 maps to 0.0, not -0.0."""
    p = np.clip(np.asarray(p_values, dtype=float), SMALLEST_P, 1.0)
    return -np.log10(p) + 0.0


def expected_quantiles(n):
    """-log10 of the uniform order-statistic means i / (n + 1), smallest p first."""
    return neg_log10(np.arange(1, n + 1) / (n + 1.0))


def _chromosome_key(chromosome):
    text = str(chromosome)
    stripped = text[3:] if text.lower().startswith('chr') else text
    return (0, int(stripped), '') if stripped.isdigit() else (1, 0, stripped)


def manhattan_frame(records):
    ordered = sorted(records, key=lambda r: (_chromosome_key(r.chromosome), r.position, r.snp_id))
    return pd.DataFrame({
        'snp_id': [r.snp_id for r in ordered],
        'chromosome': [str(r.chromosome) for r in ordered],
        'position': np.array([r.position for r in ordered], dtype=np.int64),
        'neg_log10_p': neg_log10([r.p_value for r in ordered]),
    }, columns=list(MANHATTAN_COLUMNS))


def qq_frame(records):
    observed = np.sort(neg_log10([r.p_value for r in records]))[::-1]
    return pd.DataFrame({'expected': expected_quantiles(observed.size), 'observed': observed})


def _plot_manhattan(path, manhattan):
    import matplotlib
    matplotlib.use('Agg')
    import matplotlib.pyplot as plt

    figure, axes = plt.subplots(figsize=(10, 4))
    offset, ticks = 0, []
    for index, (chromosome, rows) in enumerate(manhattan.groupby('chromosome', sort=False)):
        positions = rows['position'].to_numpy(dtype=float)
        span = positions.max() - positions.min() if positions.size > 1 else 1.0
        x = offset + (positions - positions.min())
        axes.scatter(x, rows['neg_log10_p'], s=4, color='tab:blue' if index % 2 == 0 else 'tab:gray')
        ticks.append((offset + span / 2.0, chromosome))
        offset += span * 1.05 + 1.0
    axes.axhline(-np.log10(GENOME_WIDE), color='tab:red', linewidth=0.8, linestyle='--')
    axes.set_xticks([t[0] for t in ticks], [t[1] for t in ticks])
    axes.set_xlabel('chromosome')
    axes.set_ylabel('-log10 p')
    figure.tight_layout()
    figure.savefig(path)
    plt.close(figure)


def _plot_qq(path, qq):
    import matplotlib
    matplotlib.use('Agg')
    import matplotlib.pyplot as plt

    figure, axes = plt.subplots(figsize=(5, 5))
    axes.scatter(qq['expected'], qq['observed'], s=4)
    top = float(max(qq['expected'].max(), qq['observed'].max(), 1.0))
    axes.plot([0, top], [0, top], color='tab:red', linewidth=0.8)
    axes.set_xlabel('expected -log10 p')
    axes.set_ylabel('observed -log10 p')
    figure.tight_layout()
    figure.savefig(path)
    plt.close(figure)


def qq_manhattan_export(records, prefix, *, plots=False):
    """Write ``<prefix>.manhattan.tsv`` and ``<prefix>.qq.tsv`` from the tested records.

    Skipped records carry no p-value of their own and are left out. Returns the
    list of written paths.
    """
    tested = [r for r in records if r.is_ok]
    if not tested:
        raise DataError('no tested SNPs to export')
    prefix = Path(prefix)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    manhattan = manhattan_frame(tested)
    qq = qq_frame(tested)

    manhattan_path = prefix.with_name(prefix.name + '.manhattan.tsv')
    manhattan.to_csv(manhattan_path, sep='\t', index=False, float_format=SCORE_FLOAT_FORMAT)
    qq_path = prefix.with_name(prefix.name + '.qq.tsv')
    qq.to_csv(qq_path, sep='\t', index=False, float_format=SCORE_FLOAT_FORMAT)

    written = [manhattan_path, qq_path]
    if plots:
        written.append(prefix.with_name(prefix.name + '.manhattan.png'))
        _plot_manhattan(written[-1], manhattan)
        written.append(prefix.with_name(prefix.name + '.qq.png'))
        _plot_qq(written[-1], qq)
    logger.info('exported manhattan and qq data', extra={'records': len(tested), 'plots': plots})
    return written


def write_interaction_bands(path, bands, time_scale=None):
    """One row per (time, term): estimate and its +-2 SE band.

    Times are mapped back to the study scale when a TimeScale is given.
    """
    times = bands.grid.points if time_scale is None else time_scale.to_study(bands.grid.points)
    terms = len(bands.terms)
    table = pd.DataFrame({
        'time': np.tile(times, terms),
        'term': np.repeat(list(bands.terms), times.size),
        'estimate': np.ravel(bands.estimate),
        'lower': np.ravel(bands.lower),
        'upper': np.ravel(bands.upper),
    })
    table.to_csv(path, sep='\t', index=False, float_format='%.10g')
    return path
