"""
Base class for the funcscan management commands.

Subclasses implement ``run(**options)`` instead of ``handle``. The base maps
the error families onto the documented exit codes:

    0  success
    1  usage error (bad or missing arguments)
    2  data error (unreadable input, violated precondition)
    3  numerical failure
"""

import logging
import sys

from django.core.management.base import BaseCommand, CommandError

from funcscan_platform.errors import DataError, NumericalError

logger = logging.getLogger(__name__)

EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERICAL = 3


def csv_list(value):
    """argparse type for comma-separated name lists ('age,gender')."""
    return [item.strip() for item in value.split(',') if item.strip()]


def float_list(value):
    return [float(item) for item in csv_list(value)]


def int_list(value):
    return [int(item) for item in csv_list(value)]


class FuncScanCommand(BaseCommand):
    requires_system_checks = []

    def create_parser(self, prog_name, subcommand, **kwargs):
        parser = super().create_parser(prog_name, subcommand, **kwargs)
        if getattr(self, '_called_from_command_line', False):
            def usage_error(message):
                parser.print_usage(sys.stderr)
                parser.exit(EXIT_USAGE, f'{parser.prog}: error: {message}\n')
            parser.error = usage_error
        return parser

    def add_seed_argument(self, parser, default=0):
        parser.add_argument(
            '--seed',
            type=int,
            default=default,
            help=f'Seed for every random stream used by this command (default: {default}).',
        )

    def handle(self, *args, **options):
        try:
            return self.run(**options)
        except DataError as exc:
            logger.error('data error: %s', exc)
            raise CommandError(str(exc), returncode=EXIT_DATA) from exc
        except NumericalError as exc:
            logger.error('numerical failure: %s', exc)
            raise CommandError(str(exc), returncode=EXIT_NUMERICAL) from exc
        except OSError as exc:
            raise CommandError(str(exc), returncode=EXIT_DATA) from exc

    def run(self, **options):
        raise NotImplementedError('subclasses of FuncScanCommand must provide a run() method')
