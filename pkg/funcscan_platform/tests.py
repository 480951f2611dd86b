"""Tests for funcscan_platform (health endpoints, logging, command base, cli)."""

import json
import logging
import sys
from io import StringIO

import numpy as np
import pytest
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import TestCase, override_settings

from funcscan_platform import cli
from funcscan_platform.commands import EXIT_DATA, EXIT_NUMERICAL, FuncScanCommand, csv_list, float_list, int_list
from funcscan_platform.conf import setting
from funcscan_platform.errors import GridMismatch, InputFormatError, RankDeficient
from funcscan_platform.logging_config import JSONFormatter


class HealthEndpointsTest(TestCase):
    """Test health check endpoints."""

    def test_healthz_returns_200(self):
        response = self.client.get('/healthz/')
        self.assertEqual(response.status_code, 200)
        self.assertEqual(response.json(), {'status': 'ok'})

    def test_readyz_returns_200_when_db_ok(self):
        response = self.client.get('/readyz/')
        self.assertEqual(response.status_code, 200)
        data = response.json()
        self.assertEqual(data['status'], 'ok')
        self.assertEqual(data['database'], 'connected')


def make_record(msg='scan finished', **extra):
    record = logging.LogRecord('scan.engine', logging.INFO, __file__, 10, msg, None, None)
    for key, value in extra.items():
        setattr(record, key, value)
    return record


class TestJSONFormatter:
    def test_single_line_with_extras(self):
        line = JSONFormatter().format(make_record(snp_id='rs1', status='ok'))
        assert '\n' not in line
        payload = json.loads(line)
        assert payload['message'] == 'scan finished'
        assert payload['logger'] == 'scan.engine'
        assert payload['level'] == 'INFO'
        assert payload['snp_id'] == 'rs1'
        assert payload['status'] == 'ok'

    def test_numpy_values(self):
        payload = json.loads(JSONFormatter().format(make_record(smoothing=np.float64(0.25), curve=np.zeros((3, 4)))))
        assert payload['smoothing'] == 0.25
        assert payload['curve'] == '<array shape=(3, 4)>'

    def test_exception_text(self):
        try:
            raise RankDeficient('design is rank deficient')
        except RankDeficient:
            record = make_record()
            record.exc_info = sys.exc_info()
        payload = json.loads(JSONFormatter().format(record))
        assert 'RankDeficient' in payload['exception']


class TestSetting:
    @override_settings(FUNCSCAN_SCAN_THREADS=7)
    def test_reads_configured_value(self):
        assert setting('FUNCSCAN_SCAN_THREADS', 1) == 7

    def test_missing_name_falls_back(self):
        assert setting('FUNCSCAN_NOT_A_SETTING', 'fallback') == 'fallback'


class TestArgumentTypes:
    def test_csv_list(self):
        assert csv_list(' age, gender ,,') == ['age', 'gender']

    def test_numeric_lists(self):
        assert float_list('1,0.5') == [1.0, 0.5]
        assert int_list('3,4,5') == [3, 4, 5]


class RaisingCommand(FuncScanCommand):
    def add_arguments(self, parser):
        parser.add_argument('--fail', default='')

    def run(self, **options):
        if options['fail'] == 'data':
            raise InputFormatError('bad header', path='pheno.csv', line=1)
        if options['fail'] == 'grid':
            raise GridMismatch('grids differ')
        if options['fail'] == 'numerical':
            raise RankDeficient('singular design')
        if options['fail'] == 'io':
            raise FileNotFoundError('missing.csv')
        self.stdout.write('done')


class TestFuncScanCommand:
    def run(self, *args):
        out = StringIO()
        call_command(RaisingCommand(), *args, stdout=out, stderr=StringIO())
        return out.getvalue()

    def test_success(self):
        assert self.run() == 'done\n'

    @pytest.mark.parametrize('failure, code', [
        ('data', EXIT_DATA), ('grid', EXIT_DATA), ('io', EXIT_DATA), ('numerical', EXIT_NUMERICAL),
    ])
    def test_exit_codes(self, failure, code):
        with pytest.raises(CommandError) as excinfo:
            self.run('--fail', failure)
        assert excinfo.value.returncode == code

    def test_input_error_names_location(self):
        with pytest.raises(CommandError, match='pheno.csv:1: bad header'):
            self.run('--fail', 'data')


class TestConsoleScript:
    @pytest.fixture
    def captured(self, monkeypatch):
        calls = []
        monkeypatch.setattr('django.core.management.execute_from_command_line', calls.append)
        return calls

    def test_test_is_routed_to_assoctest(self, captured):
        cli.main(['/usr/bin/funcscan', 'test', '--curves', 'c.tsv'])
        assert captured == [['funcscan', 'assoctest', '--curves', 'c.tsv']]

    def test_other_commands_pass_through(self, captured):
        cli.main(['funcscan', 'smooth', '--help'])
        assert captured == [['funcscan', 'smooth', '--help']]

    def test_no_subcommand(self, captured):
        cli.main(['funcscan'])
        assert captured == [['funcscan']]
