"""
``funcscan`` console script.

A thin front for ``manage.py``: ``funcscan smooth ...`` runs the ``smooth``
management command with funcscan_platform.settings. ``funcscan test`` is
routed to ``assoctest`` so Django's own test runner keeps its name.
"""

import os
import sys

COMMAND_ALIASES = {
    'test': 'assoctest',
}


def main(argv=None):
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'funcscan_platform.settings')
    from django.core.management import execute_from_command_line

    argv = list(sys.argv if argv is None else argv)
    if len(argv) > 1:
        argv[1] = COMMAND_ALIASES.get(argv[1], argv[1])
    argv[0] = 'funcscan'
    execute_from_command_line(argv)


if __name__ == '__main__':
    main()
