"""
Scalability checks for the genome scan.

Run with ``python manage.py run_benchmarks``; results are stored under
stress_tests/reports/benchmarks.
"""
