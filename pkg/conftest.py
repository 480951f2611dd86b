"""
Pytest configuration and shared fixtures.

Uses factory_boy for stored scan data.
"""

import logging

import pytest
from django.contrib.auth import get_user_model

APP_LOGGERS = ('fnspace', 'smoothing', 'qform', 'flm', 'assoc', 'simgen', 'scan', 'api', 'funcscan_platform')

User = get_user_model()


@pytest.fixture(autouse=True)
def propagate_app_logs():
    """App loggers do not propagate in settings; let caplog see their records."""
    loggers = [logging.getLogger(name) for name in APP_LOGGERS]
    previous = [logger.propagate for logger in loggers]
    for logger in loggers:
        logger.propagate = True
    yield
    for logger, value in zip(loggers, previous):
        logger.propagate = value


@pytest.fixture
def user(db):
    """Create a test user."""
    return User.objects.create_user(
        username='analyst',
        email='analyst@example.com',
        password='testpass123',
    )


@pytest.fixture
def scan_run(db):
    """A finished scan run with three hits."""
    from scan.factories import ScanHitFactory, ScanRunFactory
    run = ScanRunFactory(snp_count=3, tested_count=2, min_p_value=1e-6)
    ScanHitFactory(run=run, snp_id='rs1', p_value=1e-6, statistic=40.0)
    ScanHitFactory(run=run, snp_id='rs2', p_value=0.3, statistic=1.2)
    ScanHitFactory(run=run, snp_id='rs3', p_value=1.0, statistic=0.0, status='skipped_maf', truncation_i=0)
    return run
