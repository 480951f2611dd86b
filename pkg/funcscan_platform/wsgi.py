"""WSGI entry point for the funcscan API server (gunicorn funcscan_platform.wsgi)."""

import os

from django.core.wsgi import get_wsgi_application

os.environ.setdefault("DJANGO_SETTINGS_MODULE", "funcscan_platform.settings")

application = get_wsgi_application()
