"""
Background genome scans (``funcscan scan --async``).
"""

import logging

from celery import shared_task

from funcscan_platform.errors import FuncScanError

from .models import ScanRun
from .services import execute_run

logger = logging.getLogger(__name__)


@shared_task
def run_scan_task(run_id):
    """Execute a stored ScanRun; returns the final run status."""
    try:
        run = ScanRun.objects.get(pk=run_id)
    except ScanRun.DoesNotExist:
        logger.error('scan run not found', extra={'run_id': run_id})
        return 'missing'
    if run.status in ('running', 'done'):
        return run.status
    try:
        execute_run(run)
    except (FuncScanError, OSError):
        return 'failed'
    return 'done'
