"""
Run the scan throughput benchmarks.

Usage:
    python manage.py run_benchmarks
    python manage.py run_benchmarks --compare
    python manage.py run_benchmarks --save laptop-baseline
"""

import subprocess
import sys
from pathlib import Path

from django.conf import settings
from django.core.management.base import BaseCommand


class Command(BaseCommand):
    help = 'Run the scan throughput benchmarks with pytest-benchmark'

    def add_arguments(self, parser):
        parser.add_argument('--compare', action='store_true', help='Compare against the last saved results')
        parser.add_argument('--save', type=str, default=None, help='Save results under this name')
        parser.add_argument('--include-slow', action='store_true', help='Also run the 100k-SNP smoke benchmark')
        parser.add_argument('--verbose', action='store_true', help='Verbose output')

    def handle(self, *args, **options):
        benchmark_dir = Path(settings.BASE_DIR) / 'stress_tests' / 'benchmarks'
        if not benchmark_dir.exists():
            self.stdout.write(self.style.ERROR(f'Benchmark directory not found: {benchmark_dir}'))
            return

        cmd = [sys.executable, '-m', 'pytest', str(benchmark_dir), '--benchmark-only', '--benchmark-autosave']
        cmd += ['-m', 'slow or not slow'] if options['include_slow'] else ['-m', 'not slow']
        if options['verbose']:
            cmd.append('-v')
        if options['compare']:
            cmd.append('--benchmark-compare')
        if options['save']:
            cmd.extend(['--benchmark-save', options['save']])

        self.stdout.write(self.style.SUCCESS('Running scan benchmarks...'))
        try:
            subprocess.run(cmd, check=True)
        except subprocess.CalledProcessError as e:
            self.stdout.write(self.style.ERROR(f'Benchmark failed: {e}'))
            sys.exit(1)
