"""Tests for the ``pvalue`` management command."""

from io import StringIO

import pytest
from django.core.management import call_command
from django.core.management.base import CommandError


def _run(*args):
    out = StringIO()
    call_command('pvalue', *args, stdout=out, stderr=StringIO())
    return dict(line.split('\t') for line in out.getvalue().strip().splitlines())


class TestPvalueCommand:
    def test_single_weight(self, tmp_path):
        weights = tmp_path / 'weights.txt'
        weights.write_text('1.0\n')
        result = _run('--weights', str(weights), '--statistic', '3.841459')
        assert float(result['p_value']) == pytest.approx(0.05, abs=1e-4)
        assert result['method'] == 'chi2'

    def test_comma_separated_weights_with_mc(self, tmp_path):
        weights = tmp_path / 'weights.txt'
        weights.write_text('# leading eigenvalues\n1.0, 0.5, 0.25\n')
        result = _run('--weights', str(weights), '--statistic', '2.0', '--mc-reps', '20000', '--seed', '3')
        assert result['terms'] == '3'
        assert abs(float(result['p_value']) - float(result['mc_p_value'])) < 0.02

    def test_unparsable_weights_is_a_data_error(self, tmp_path):
        weights = tmp_path / 'weights.txt'
        weights.write_text('1.0\nabc\n')
        with pytest.raises(CommandError) as excinfo:
            _run('--weights', str(weights), '--statistic', '1.0')
        assert excinfo.value.returncode == 2
        assert 'weights.txt:2' in str(excinfo.value)

    def test_negative_statistic_is_a_data_error(self, tmp_path):
        weights = tmp_path / 'weights.txt'
        weights.write_text('1.0 0.5\n')
        with pytest.raises(CommandError) as excinfo:
            _run('--weights', str(weights), '--statistic', '-1')
        assert excinfo.value.returncode == 2

    def test_missing_file_is_a_data_error(self, tmp_path):
        with pytest.raises(CommandError) as excinfo:
            _run('--weights', str(tmp_path / 'absent.txt'), '--statistic', '1')
        assert excinfo.value.returncode == 2
