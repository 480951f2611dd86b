"""
Health check endpoints.

- /healthz: liveness, the process answers
- /readyz: readiness, the database holding stored scans is reachable
"""

from django.db import connection
from django.http import JsonResponse


def healthz(request):
    return JsonResponse({'status': 'ok'})


def readyz(request):
    try:
        connection.ensure_connection()
    except Exception:
        return JsonResponse({'status': 'error', 'database': 'disconnected'}, status=503)
    return JsonResponse({'status': 'ok', 'database': 'connected'})
