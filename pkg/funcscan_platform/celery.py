"""
Celery configuration for funcscan_platform.

Used for background genome scans queued with ``funcscan scan --async``
(see scan.tasks.run_scan_task).
"""

import os

from celery import Celery

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'funcscan_platform.settings')

app = Celery('funcscan_platform')
app.config_from_object('django.conf:settings', namespace='CELERY')
app.autodiscover_tasks()
