"""Tests for the longitudinal/curve file formats and the ``smooth`` command."""

import json
from io import StringIO

import numpy as np
import pytest
from django.core.management import call_command
from django.core.management.base import CommandError

from funcscan_platform.errors import InputFormatError
from smoothing.io import read_curves, read_long_format


def write_long(path, subjects=12, points=8, seed=0):
    rng = np.random.default_rng(seed)
    lines = ['subject_id,time,value']
    for s in range(subjects):
        for age in np.sort(rng.uniform(5, 17, points)):
            lines.append(f'p{s:02d},{age:.4f},{2 + 0.1 * age + rng.normal(scale=0.05):.5f}')
    path.write_text('\n'.join(lines) + '\n')
    return path


class TestReadLongFormat:
    def test_rescales_study_window(self, tmp_path):
        path = tmp_path / 'pheno.csv'
        path.write_text('subject_id,time,value\na,5,1.0\na,10,2.0\nb,15,3.0\n')
        records, scale = read_long_format(path)
        assert (scale.start, scale.stop) == (5.0, 15.0)
        assert [r.time for r in records] == [0.0, 0.5, 1.0]
        assert records[0].subject_id == 'a'

    def test_numeric_subject_ids_stay_strings(self, tmp_path):
        path = tmp_path / 'pheno.csv'
        path.write_text('subject_id,time,value\n007,0.1,1\n007,0.9,2\n')
        records, _ = read_long_format(path, rescale=False)
        assert records[0].subject_id == '007'

    def test_bad_value_reports_line(self, tmp_path):
        path = tmp_path / 'pheno.csv'
        path.write_text('subject_id,time,value\na,0.1,1.0\na,0.2,oops\n')
        with pytest.raises(InputFormatError) as excinfo:
            read_long_format(path)
        assert excinfo.value.line == 3
        assert 'pheno.csv:3' in str(excinfo.value)

    def test_missing_column(self, tmp_path):
        path = tmp_path / 'pheno.csv'
        path.write_text('id,time,value\na,0.1,1.0\n')
        with pytest.raises(InputFormatError, match='subject_id'):
            read_long_format(path)


class TestReadCurves:
    def test_rejects_ragged_rows(self, tmp_path):
        path = tmp_path / 'curves.tsv'
        path.write_text('grid\t0\t0.5\t1\ns1\t1\t2\t3\ns2\t1\t2\n')
        with pytest.raises(InputFormatError) as excinfo:
            read_curves(path)
        assert excinfo.value.line == 3

    def test_requires_grid_row(self, tmp_path):
        path = tmp_path / 'curves.tsv'
        path.write_text('s1\t1\t2\n')
        with pytest.raises(InputFormatError):
            read_curves(path)

    def test_non_numeric_value_reports_line(self, tmp_path):
        path = tmp_path / 'curves.tsv'
        path.write_text('grid\t0\t1\ns1\t1\t2\ns2\tx\t2\n')
        with pytest.raises(InputFormatError, match='non-numeric') as excinfo:
            read_curves(path)
        assert excinfo.value.line == 3

    def test_rejects_extra_fields(self, tmp_path):
        path = tmp_path / 'curves.tsv'
        path.write_text('grid\t0\t1\ns1\t1\t2\t3\n')
        with pytest.raises(InputFormatError):
            read_curves(path)

    def test_ids_stay_strings_and_values_exact(self, tmp_path):
        path = tmp_path / 'curves.tsv'
        path.write_text('grid\t0\t0.25\t1\n007\t0.1\t-2.5e-03\t3\n010\t1\t2\t3\n')
        curves, subject_ids, metadata = read_curves(path)
        assert subject_ids == ('007', '010')
        np.testing.assert_array_equal(curves.grid.points, [0.0, 0.25, 1.0])
        np.testing.assert_array_equal(curves.values[0], [0.1, -2.5e-3, 3.0])
        assert metadata == {}


@pytest.mark.django_db
class TestSmoothCommand:
    def test_writes_curves_and_sidecar(self, tmp_path):
        pheno = write_long(tmp_path / 'pheno.csv')
        out = tmp_path / 'curves.tsv'
        stdout = StringIO()
        call_command('smooth', '--pheno', str(pheno), '--grid', '20', '--out', str(out), stdout=stdout)

        curves, subject_ids, metadata = read_curves(out)
        assert curves.values.shape == (12, 20)
        assert subject_ids[0] == 'p00'
        assert metadata['time_scale']['start'] >= 5.0
        assert metadata['chosen_lambda'] > 0
        assert json.loads((tmp_path / 'curves.tsv.json').read_text())['subjects'] == 12
        assert 'Smoothed 12 subjects' in stdout.getvalue()

    def test_output_is_deterministic(self, tmp_path):
        pheno = write_long(tmp_path / 'pheno.csv', seed=3)
        for name in ('a.tsv', 'b.tsv'):
            call_command('smooth', '--pheno', str(pheno), '--out', str(tmp_path / name), stdout=StringIO())
        assert (tmp_path / 'a.tsv').read_bytes() == (tmp_path / 'b.tsv').read_bytes()

    def test_bad_input_exits_with_data_code(self, tmp_path):
        pheno = tmp_path / 'pheno.csv'
        pheno.write_text('subject_id,time,value\na,1,x\n')
        with pytest.raises(CommandError) as excinfo:
            call_command('smooth', '--pheno', str(pheno), '--out', str(tmp_path / 'o.tsv'), stdout=StringIO())
        assert excinfo.value.returncode == 2
