"""Tests for Manhattan/QQ export and the interaction band file."""

import numpy as np
import pandas as pd
import pytest

from fnspace.grids import TimeGrid
from funcscan_platform.errors import DataError
from scan.engine import STATUS_OK, STATUS_SKIPPED_MAF, InteractionBands, ScanRecord
from scan.export import expected_quantiles, neg_log10, qq_manhattan_export, write_interaction_bands
from smoothing.pipeline import TimeScale


def record(snp_id, p_value, chromosome='1', position=100, status=STATUS_OK):
    return ScanRecord(snp_id, chromosome, position, 0.3, 50, 1.0, p_value, 5, status)


def read_table(path):
    lines = path.read_text().splitlines()
    return lines[0].split('\t'), [line.split('\t') for line in lines[1:]]


class TestNegLog10:
    def test_definition(self):
        assert neg_log10(0.01) == pytest.approx(2.0)

    def test_p_one_is_positive_zero(self):
        value = neg_log10([1.0])[0]
        assert value == 0.0
        assert not np.signbit(value)

    def test_zero_p_is_finite(self):
        assert np.isfinite(neg_log10(0.0))

    def test_expected_quantiles(self):
        np.testing.assert_allclose(expected_quantiles(3), -np.log10([0.25, 0.5, 0.75]))


class TestQqManhattanExport:
    def test_single_record(self, tmp_path):
        paths = qq_manhattan_export([record('rs1', 0.01)], tmp_path / 'out')
        header, rows = read_table(paths[0])
        assert header == ['snp_id', 'chromosome', 'position', 'neg_log10_p']
        assert rows == [['rs1', '1', '100', '2.000000']]
        _, qq = read_table(paths[1])
        assert qq == [[f'{-np.log10(0.5):.6f}', '2.000000']]

    def test_all_null_p_values_give_zero_observed(self, tmp_path):
        records = [record(f'rs{i}', 1.0) for i in range(5)]
        _, qq = read_table(qq_manhattan_export(records, tmp_path / 'out')[1])
        assert [row[1] for row in qq] == ['0.000000'] * 5

    def test_skipped_records_are_left_out(self, tmp_path):
        records = [record('rs1', 0.2), record('rs2', 1.0, status=STATUS_SKIPPED_MAF)]
        _, rows = read_table(qq_manhattan_export(records, tmp_path / 'out')[0])
        assert [row[0] for row in rows] == ['rs1']

    def test_manhattan_sorted_by_genome_position(self, tmp_path):
        records = [
            record('a', 0.5, chromosome='10', position=5),
            record('b', 0.5, chromosome='2', position=50),
            record('c', 0.5, chromosome='2', position=7),
            record('d', 0.5, chromosome='X', position=1),
        ]
        _, rows = read_table(qq_manhattan_export(records, tmp_path / 'out')[0])
        assert [row[0] for row in rows] == ['c', 'b', 'a', 'd']

    def test_qq_observed_descending(self, tmp_path):
        records = [record(f'rs{i}', p) for i, p in enumerate([0.5, 0.001, 0.2, 0.9])]
        _, qq = read_table(qq_manhattan_export(records, tmp_path / 'out')[1])
        observed = [float(row[1]) for row in qq]
        assert observed == sorted(observed, reverse=True)
        assert observed[0] == pytest.approx(3.0)

    def test_uniform_p_values_track_diagonal(self, tmp_path):
        p_values = np.random.default_rng(5).uniform(size=20_000)
        records = [record(f'rs{i}', p) for i, p in enumerate(p_values)]
        _, qq = read_table(qq_manhattan_export(records, tmp_path / 'out')[1])
        expected = 10 ** -np.array([float(row[0]) for row in qq])
        observed = 10 ** -np.array([float(row[1]) for row in qq])
        # Kolmogorov-Smirnov bound at the 0.1% level
        assert np.max(np.abs(expected - observed)) < 1.95 / np.sqrt(len(records))

    def test_tables_read_back_with_pandas(self, tmp_path):
        records = [record('rs1', 0.01, chromosome='2'), record('rs2', 1e-9, chromosome='1')]
        manhattan_path, qq_path = qq_manhattan_export(records, tmp_path / 'out')
        manhattan = pd.read_csv(manhattan_path, sep='\t', dtype={'chromosome': str})
        assert manhattan['snp_id'].tolist() == ['rs2', 'rs1']
        np.testing.assert_allclose(manhattan['neg_log10_p'], [9.0, 2.0])
        qq = pd.read_csv(qq_path, sep='\t')
        assert list(qq.columns) == ['expected', 'observed']
        np.testing.assert_allclose(qq['observed'], [9.0, 2.0])

    def test_no_tested_records(self, tmp_path):
        with pytest.raises(DataError):
            qq_manhattan_export([record('rs1', 1.0, status=STATUS_SKIPPED_MAF)], tmp_path / 'out')

    def test_plots(self, tmp_path):
        records = [record(f'rs{i}', p, chromosome=str(1 + i % 3), position=10 * i)
                   for i, p in enumerate(np.linspace(0.01, 1.0, 30))]
        paths = qq_manhattan_export(records, tmp_path / 'plots' / 'scan', plots=True)
        assert [p.name for p in paths] == [
            'scan.manhattan.tsv', 'scan.qq.tsv', 'scan.manhattan.png', 'scan.qq.png',
        ]
        assert all(p.stat().st_size > 0 for p in paths)


class TestInteractionBands:
    def test_rows_on_study_scale(self, tmp_path):
        grid = TimeGrid.uniform(3)
        bands = InteractionBands(
            grid=grid,
            terms=('snp:treatment[placebo]',),
            estimate=np.array([[0.0, 1.0, 2.0]]),
            standard_error=np.array([[0.5, 0.5, 0.5]]),
        )
        path = write_interaction_bands(tmp_path / 'bands.tsv', bands, TimeScale(5.0, 15.0))
        header, rows = read_table(path)
        assert header == ['time', 'term', 'estimate', 'lower', 'upper']
        assert rows[1] == ['10', 'snp:treatment[placebo]', '1', '0', '2']
        assert len(rows) == 3
