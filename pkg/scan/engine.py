"""
Per-SNP association scan.

The phenotype curves, the covariates and the genotype columns are joined on
subject id once, in phenotype order. Each SNP then gets its own design
(intercept + adjust columns + dosage as the test column) and a Lambda test.
Chunks of SNPs are dispatched to a joblib thread pool; records come back in
input order whatever the pool size.
"""

from __future__ import annotations

import dataclasses
import itertools
import logging
import time
from dataclasses import dataclass, field

import numpy as np
import pandas as pd
from joblib import Parallel, delayed

from assoc.statistics import lambda_test, shared_null_lambda_test
from flm.design import DesignMatrix
from flm.fitting import fit
from fnspace.grids import CurveSet
from funcscan_platform.conf import setting
from funcscan_platform.errors import DataError, NumericalError

from .covariates import design_columns, dummy_columns, join_subjects
from .genotypes import GenotypeTable, minor_allele_frequency

logger = logging.getLogger(__name__)

STATUS_OK = 'ok'
STATUS_SKIPPED_MAF = 'skipped_maf'
STATUS_SKIPPED_RANK = 'skipped_rank'
STATUS_SKIPPED_MISSING = 'skipped_missing'
STATUSES = (STATUS_OK, STATUS_SKIPPED_MAF, STATUS_SKIPPED_RANK, STATUS_SKIPPED_MISSING)

MISSING_MEAN_IMPUTE = 'mean_impute'
MISSING_DROP_SUBJECT = 'drop_subject'
MISSING_POLICIES = (MISSING_MEAN_IMPUTE, MISSING_DROP_SUBJECT)

NULL_PER_SNP = 'per_snp'
NULL_SHARED = 'shared'

SNP_COLUMN = 'snp'
BAND_WIDTH = 2.0

RECORD_COLUMNS = (
    'snp_id', 'chromosome', 'position', 'maf', 'n_used', 'statistic',
    'p_value', 'truncation_I', 'status', 'null_spectrum',
)
RECORD_FLOAT_FORMAT = '%.10g'


@dataclass(frozen=True)
class ScanConfig:
    maf_threshold: float = 0.05
    missing_policy: str = MISSING_MEAN_IMPUTE
    adjust: tuple = ()
    interaction: str | None = None
    threads: int | None = None
    chunk_size: int | None = None
    shared_null_spectrum: bool = False
    output: str | None = None
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.maf_threshold <= 0.5:
            raise DataError(f'maf_threshold must lie in [0, 0.5], got {self.maf_threshold}')
        if self.missing_policy not in MISSING_POLICIES:
            raise DataError(f'unknown missing policy {self.missing_policy!r}; use one of {", ".join(MISSING_POLICIES)}')
        object.__setattr__(self, 'adjust', tuple(self.adjust))
        if self.threads is not None and int(self.threads) < 1:
            raise DataError('threads must be at least 1')
        if self.chunk_size is not None and int(self.chunk_size) < 1:
            raise DataError('chunk_size must be at least 1')

    @property
    def worker_count(self):
        return int(self.threads or setting('FUNCSCAN_SCAN_THREADS', 1))

    @property
    def snps_per_chunk(self):
        return int(self.chunk_size or setting('FUNCSCAN_SCAN_CHUNK_SIZE', 256))

    @property
    def null_spectrum(self):
        return NULL_SHARED if self.shared_null_spectrum else NULL_PER_SNP

    def as_dict(self):
        return dataclasses.asdict(self)


@dataclass(frozen=True)
class ScanRecord:
    snp_id: str
    chromosome: str
    position: int
    maf: float
    n_used: int
    statistic: float
    p_value: float
    truncation_I: int
    status: str
    null_spectrum: str = NULL_PER_SNP

    def __post_init__(self):
        if self.status not in STATUSES:
            raise DataError(f'unknown scan status {self.status!r}')
        if not 0.0 <= self.p_value <= 1.0:
            raise DataError(f'p-value {self.p_value} outside [0, 1]')

    @property
    def is_ok(self):
        return self.status == STATUS_OK

    def as_dict(self):
        return dataclasses.asdict(self)


@dataclass(frozen=True, eq=False)
class InteractionBands:
    """Interaction coefficient curves with pointwise +-2 SE bands (terms x T)."""

    grid: object
    terms: tuple
    estimate: np.ndarray
    standard_error: np.ndarray

    @property
    def lower(self):
        return self.estimate - BAND_WIDTH * self.standard_error

    @property
    def upper(self):
        return self.estimate + BAND_WIDTH * self.standard_error


@dataclass(frozen=True, eq=False)
class _ScanContext:
    curves: CurveSet
    base: DesignMatrix
    genotype_columns: np.ndarray
    null_fit: object
    cfg: ScanConfig
    treatment: dict = field(default_factory=dict)


def _phenotype_parts(phenotypes):
    """(CurveSet, subject ids) from a SmoothedSample or a (curves, ids) pair."""
    if hasattr(phenotypes, 'curves') and hasattr(phenotypes, 'subject_ids'):
        return phenotypes.curves, tuple(phenotypes.subject_ids)
    curves, subject_ids = phenotypes
    if len(curves) != len(subject_ids):
        raise DataError(f'{len(curves)} curves for {len(subject_ids)} subject ids')
    return curves, tuple(str(s) for s in subject_ids)


def _adjust_names(cfg):
    names = list(cfg.adjust)
    if cfg.interaction and cfg.interaction not in names:
        names.append(cfg.interaction)
    return names


def prepare_scan(phenotypes, covariates, genotype_subjects, cfg):
    """Join the inputs and fit the covariates-only model shared by every SNP."""
    curves, subject_ids = _phenotype_parts(phenotypes)
    names = _adjust_names(cfg)
    rows, aligned = join_subjects(subject_ids, covariates, required=names, also_present=genotype_subjects)
    curves = curves.subset(rows)
    adjust = design_columns(aligned, [n for n in names if n != cfg.interaction])
    treatment = {}
    if cfg.interaction:
        treatment = dummy_columns(cfg.interaction, aligned[cfg.interaction].to_numpy())
        adjust.update(treatment)
    base = DesignMatrix.build(adjust=adjust, rows=len(rows))
    position = {sid: i for i, sid in enumerate(str(s) for s in genotype_subjects)}
    genotype_columns = np.array([position[sid] for sid in aligned.index], dtype=int)
    null_fit = None
    if not cfg.interaction:
        shared = cfg.shared_null_spectrum
        null_fit = fit(curves, base, covariance=shared, spectrum=shared)
    logger.info('scan inputs joined', extra={
        'subjects': len(rows), 'adjust_columns': base.adjust_count, 'null_spectrum': cfg.null_spectrum,
    })
    return _ScanContext(curves, base, genotype_columns, null_fit, cfg, treatment)


def _interaction_design(base, snp, treatment):
    """Adjust block gains the SNP main effect; the test block is SNP x treatment dummies."""
    adjust = {name: base.column(name) for name in base.names if name != 'intercept'}
    adjust[SNP_COLUMN] = snp
    test = {f'{SNP_COLUMN}:{name}': snp * column for name, column in treatment.items()}
    return DesignMatrix.build(adjust=adjust, test=test, intercept=base.has_intercept)


def _skipped(chunk, index, status, maf, n_used, null_spectrum):
    return ScanRecord(
        snp_id=chunk.snp_ids[index],
        chromosome=chunk.chromosomes[index],
        position=int(chunk.positions[index]),
        maf=float(maf),
        n_used=int(n_used),
        statistic=0.0,
        p_value=1.0,
        truncation_I=0,
        status=status,
        null_spectrum=null_spectrum,
    )


def _test_snp(ctx, dosages):
    """Lambda test of one SNP column; returns (result, subjects used)."""
    cfg = ctx.cfg
    observed = ~np.isnan(dosages)
    curves, base, null_fit = ctx.curves, ctx.base, ctx.null_fit
    if observed.all():
        snp = dosages
    elif cfg.missing_policy == MISSING_MEAN_IMPUTE:
        snp = np.where(observed, dosages, np.mean(dosages[observed]))
    else:
        rows = np.flatnonzero(observed)
        curves, base, snp = curves.subset(rows), base.subset_rows(rows), dosages[rows]
        null_fit = None
    snp = snp - np.mean(snp)

    if ctx.treatment:
        treatment = {name: base.column(name) for name in ctx.treatment}
        return lambda_test(curves, _interaction_design(base, snp, treatment)), base.rows
    if cfg.shared_null_spectrum:
        if null_fit is None:
            null_fit = fit(curves, base)
        return shared_null_lambda_test(null_fit, snp), base.rows
    design = base.with_test_columns(snp, [SNP_COLUMN])
    return lambda_test(curves, design, null_fit=null_fit), base.rows


def _scan_chunk(ctx, chunk):
    cfg = ctx.cfg
    records = []
    dosages = chunk.dosages[:, ctx.genotype_columns]
    for index in range(len(chunk)):
        row = dosages[index]
        observed = ~np.isnan(row)
        n_observed = int(observed.sum())
        minimum = ctx.base.columns + len(ctx.treatment) + 2
        if n_observed == 0 or (cfg.missing_policy == MISSING_DROP_SUBJECT and n_observed < minimum):
            records.append(_skipped(chunk, index, STATUS_SKIPPED_MISSING, np.nan, n_observed, cfg.null_spectrum))
            continue
        maf = float(minor_allele_frequency(np.mean(row[observed]) / 2.0))
        n_used = n_observed if cfg.missing_policy == MISSING_DROP_SUBJECT else row.size
        if maf < cfg.maf_threshold:
            records.append(_skipped(chunk, index, STATUS_SKIPPED_MAF, maf, n_used, cfg.null_spectrum))
            continue
        try:
            result, n_used = _test_snp(ctx, row)
        except NumericalError as exc:
            logger.warning('SNP test failed; recording as skipped', extra={
                'snp_id': chunk.snp_ids[index], 'status': STATUS_SKIPPED_RANK, 'reason': str(exc),
            })
            records.append(_skipped(chunk, index, STATUS_SKIPPED_RANK, maf, n_used, cfg.null_spectrum))
            continue
        records.append(ScanRecord(
            snp_id=chunk.snp_ids[index],
            chromosome=chunk.chromosomes[index],
            position=int(chunk.positions[index]),
            maf=maf,
            n_used=int(n_used),
            statistic=result.statistic,
            p_value=result.p_value,
            truncation_I=result.truncation_I,
            status=STATUS_OK,
            null_spectrum=result.extra.get('null_spectrum', NULL_PER_SNP),
        ))
    return records


def _genotype_chunks(genotypes, size):
    if isinstance(genotypes, GenotypeTable):
        return genotypes.subject_ids, genotypes.chunks(size)
    chunks = iter(genotypes)
    try:
        first = next(chunks)
    except StopIteration:
        raise DataError('the genotype input holds no SNPs') from None
    return first.subject_ids, itertools.chain([first], chunks)


def run_scan(phenotypes, covariates, genotypes, cfg=None):
    """Yield one ScanRecord per SNP, in genotype file order.

    ``genotypes`` is a GenotypeTable or an iterable of GenotypeTable chunks
    sharing one subject order (see ``iter_genotype_chunks``).
    """
    cfg = cfg or ScanConfig()
    subjects, chunks = _genotype_chunks(genotypes, cfg.snps_per_chunk)
    ctx = prepare_scan(phenotypes, covariates, subjects, cfg)

    started = time.monotonic()
    counts = dict.fromkeys(STATUSES, 0)
    pool = Parallel(n_jobs=cfg.worker_count, prefer='threads', return_as='generator')
    for records in pool(delayed(_scan_chunk)(ctx, chunk) for chunk in chunks):
        for record in records:
            counts[record.status] += 1
            yield record
    logger.info('scan finished', extra={
        'snps': sum(counts.values()), **counts, 'seconds': round(time.monotonic() - started, 3),
        'threads': cfg.worker_count,
    })


def interaction_test(phenotypes, covariates, snp, treatment, cfg=None):
    """SNP x treatment Lambda test with coefficient bands.

    ``covariates`` is a frame aligned row-for-row with the curves; ``snp`` a
    dosage vector and ``treatment`` the factor labels. The SNP and the
    treatment main effects enter the null model; the test block holds one
    product column per non-baseline level.
    """
    cfg = cfg or ScanConfig()
    curves, _ = _phenotype_parts(phenotypes)
    snp = np.asarray(snp, dtype=float)
    if snp.shape != (len(curves),) or len(treatment) != len(curves):
        raise DataError('snp and treatment must have one entry per curve')
    if np.isnan(snp).any():
        raise DataError('interaction tests need complete dosages')
    name = cfg.interaction or 'treatment'
    levels = dummy_columns(name, treatment)
    adjust_names = [n for n in cfg.adjust if n != name]
    base = DesignMatrix.build(adjust={**design_columns(covariates, adjust_names), **levels}, rows=len(curves))
    design = _interaction_design(base, snp - snp.mean(), levels)
    result = lambda_test(curves, design)

    full = result.fit
    indices = design.indices('test')
    bands = InteractionBands(
        grid=curves.grid,
        terms=tuple(design.names[i] for i in indices),
        estimate=full.coefficients[indices],
        standard_error=full.standard_errors()[indices],
    )
    logger.info('interaction test finished', extra={
        'levels': len(levels) + 1, 'statistic': result.statistic, 'p_value': result.p_value,
    })
    return dataclasses.replace(result, extra={**result.extra, 'bands': bands, 'factor': name})


def records_frame(records):
    """ScanRecords as a DataFrame with the results-table columns."""
    return pd.DataFrame([r.as_dict() for r in records], columns=list(RECORD_COLUMNS))


def write_scan_records(path, records, chunk_size=None):
    """Tab-delimited scan table, appended chunk by chunk; returns the number of records written."""
    size = int(chunk_size or setting('FUNCSCAN_SCAN_CHUNK_SIZE', 256))
    records_frame(()).to_csv(path, sep='\t', index=False)
    records = iter(records)
    count = 0
    while chunk := list(itertools.islice(records, size)):
        records_frame(chunk).to_csv(
            path, sep='\t', index=False, header=False, mode='a', na_rep='NA', float_format=RECORD_FLOAT_FORMAT,
        )
        count += len(chunk)
    return count
