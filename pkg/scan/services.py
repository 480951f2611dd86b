"""
Scan orchestration shared by the ``scan`` command and the Celery task.

Reads the input files, runs the scan, writes the results table and, for a
stored run, records the hits and the run outcome.
"""

import logging

from django.db import transaction
from django.utils import timezone

from funcscan_platform.errors import FuncScanError
from smoothing.io import read_curves

from .covariates import read_covariates
from .engine import ScanConfig, run_scan, write_scan_records
from .genotypes import iter_genotype_chunks
from .models import ScanHit, ScanRun

logger = logging.getLogger(__name__)

HIT_BATCH_SIZE = 1000


def scan_files(curves_path, covariates_path, genotypes_path, map_path, cfg):
    """Yield ScanRecords for the given input files."""
    curves, subject_ids, _ = read_curves(curves_path)
    covariates = read_covariates(covariates_path)
    chunks = iter_genotype_chunks(genotypes_path, map_path, chunk_size=cfg.snps_per_chunk)
    yield from run_scan((curves, subject_ids), covariates, chunks, cfg)


def _summarize(records):
    tested = [r for r in records if r.is_ok]
    smallest = min((r.p_value for r in tested), default=None)
    return len(records), len(tested), smallest


def store_hits(run, records):
    hits = [ScanHit.from_record(run, record) for record in records]
    ScanHit.objects.bulk_create(hits, batch_size=HIT_BATCH_SIZE)
    return len(hits)


def execute_run(run):
    """
    Execute a stored ScanRun and save its hits.

    The run moves pending -> running -> done, or -> failed with the error
    message when any exception aborts the scan; the exception is re-raised
    to the caller. Returns the emitted records.
    """
    ScanRun.objects.filter(pk=run.pk).update(status='running', started_at=timezone.now())
    try:
        cfg = ScanConfig(**run.config)
        records = list(scan_files(run.curves_path, run.covariates_path, run.genotypes_path, run.snp_map_path, cfg))
        if run.output_path:
            write_scan_records(run.output_path, records)
    except Exception as exc:
        run.status = 'failed'
        run.error_message = str(exc)
        run.finished_at = timezone.now()
        run.save(update_fields=['status', 'error_message', 'finished_at'])
        logger.error(
            'scan run failed', extra={'run_id': run.pk, 'error': str(exc)},
            exc_info=not isinstance(exc, (FuncScanError, OSError)),
        )
        raise

    snp_count, tested_count, smallest = _summarize(records)
    with transaction.atomic():
        run.hits.all().delete()
        store_hits(run, records)
        run.status = 'done'
        run.snp_count = snp_count
        run.tested_count = tested_count
        run.min_p_value = smallest
        run.error_message = ''
        run.finished_at = timezone.now()
        run.save(update_fields=[
            'status', 'snp_count', 'tested_count', 'min_p_value', 'error_message', 'finished_at',
        ])
    logger.info('scan run stored', extra={'run_id': run.pk, 'snps': snp_count, 'tested': tested_count})
    return records
