"""
Settings lookup for library code.

The numerics apps are importable without a configured Django project (for
notebooks and the Celery worker bootstrap). ``setting`` reads
``django.conf.settings`` when it is configured and falls back to the
caller's default otherwise.
"""

from django.conf import settings


def setting(name, default):
    if not settings.configured:
        return default
    return getattr(settings, name, default)
