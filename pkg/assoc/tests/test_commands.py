"""Tests for the ``assoctest`` management command (``funcscan test``)."""

from io import StringIO

import pytest
from django.core.management import call_command
from django.core.management.base import CommandError

from scan.tests.panels import synthetic_panel, write_curve_matrix, write_panel


@pytest.fixture
def points_file(tmp_path):
    panel = synthetic_panel(n=60, snps=2, grid_size=12, causal=0)
    path = tmp_path / 'points.tsv'
    columns = [0, 4, 8, 11]
    write_curve_matrix(path, panel.curves.grid.points[columns], panel.subject_ids[::-1],
                       panel.curves.values[::-1][:, columns])
    return path


@pytest.fixture
def panel_files(tmp_path):
    panel = synthetic_panel(n=60, snps=2, grid_size=12, causal=0)
    panel.covariates['snp'] = panel.genotypes.dosages[0]
    panel.covariates['noise'] = panel.genotypes.dosages[1]
    curves, covar, _, _ = write_panel(tmp_path, panel)
    return curves, covar


def run(panel_files, *args):
    curves, covar = panel_files
    out = StringIO()
    call_command('assoctest', '--curves', str(curves), '--covar', str(covar), *args, stdout=out, stderr=StringIO())
    return dict(line.split('\t', 1) for line in out.getvalue().strip().splitlines())


class TestAssocTestCommand:
    def test_lambda_default(self, panel_files):
        result = run(panel_files, '--test', 'snp', '--adjust', 'age,gender')
        assert result['method'] == 'L2'
        assert result['df_per_term'] == '1'
        assert result['subjects'] == '60'
        assert float(result['p_value']) < 1e-4
        assert len(result['r_squared'].split(',')) == 10

    def test_null_column_not_significant(self, panel_files):
        result = run(panel_files, '--test', 'noise', '--adjust', 'age')
        assert float(result['p_value']) > 1e-4

    def test_categorical_test_column(self, panel_files):
        result = run(panel_files, '--test', 'treatment', '--adjust', 'age')
        assert result['df_per_term'] == '2'

    @pytest.mark.parametrize('method, expected', [
        ('pc', 'PC'), ('PCfixed', 'PCfixed'), ('weighted', 'Weighted'), ('endpoint', 'ENDPOINT'),
    ])
    def test_methods(self, panel_files, method, expected):
        result = run(panel_files, '--test', 'snp', '--method', method)
        assert result['method'] == expected
        assert 0 <= float(result['p_value']) <= 1

    def test_fixed_components(self, panel_files):
        result = run(panel_files, '--test', 'snp', '--method', 'PCfixed', '--components', '2')
        assert result['truncation_I'] == '2'

    def test_explicit_weights(self, panel_files):
        result = run(panel_files, '--test', 'snp', '--method', 'weighted', '--weights', '1,1,0.5')
        assert result['truncation_I'] == '3'

    def test_eigenvalue_weights_match_lambda(self, panel_files):
        weighted = run(panel_files, '--test', 'snp', '--method', 'weighted', '--weights', 'eigenvalue')
        plain = run(panel_files, '--test', 'snp')
        assert float(weighted['statistic']) == pytest.approx(float(plain['statistic']), rel=1e-8)

    def test_interaction_writes_bands(self, panel_files, tmp_path):
        bands = tmp_path / 'bands.tsv'
        result = run(panel_files, '--test', 'snp', '--adjust', 'age', '--interaction', 'treatment',
                     '--bands', str(bands))
        assert result['df_per_term'] == '2'
        lines = bands.read_text().splitlines()
        assert lines[0] == 'time\tterm\testimate\tlower\tupper'
        assert len(lines) == 1 + 2 * 12

    def test_interaction_needs_single_column(self, panel_files):
        with pytest.raises(CommandError) as excinfo:
            run(panel_files, '--test', 'snp,noise', '--interaction', 'treatment')
        assert excinfo.value.returncode == 2

    def test_unknown_method(self, panel_files):
        with pytest.raises(CommandError) as excinfo:
            run(panel_files, '--test', 'snp', '--method', 'bayes')
        assert excinfo.value.returncode == 2

    def test_unknown_column(self, panel_files):
        with pytest.raises(CommandError) as excinfo:
            run(panel_files, '--test', 'height')
        assert excinfo.value.returncode == 2
        assert 'height' in str(excinfo.value)

    def test_too_many_components(self, panel_files):
        with pytest.raises(CommandError) as excinfo:
            run(panel_files, '--test', 'snp', '--method', 'PCfixed', '--components', '40')
        assert excinfo.value.returncode == 2

    def test_mv_requires_points(self, panel_files):
        with pytest.raises(CommandError, match='--points') as excinfo:
            run(panel_files, '--test', 'snp', '--method', 'MV')
        assert excinfo.value.returncode == 2

    def test_mv_on_observed_points(self, panel_files, points_file):
        result = run(panel_files, '--test', 'snp', '--method', 'MV', '--points', str(points_file))
        assert result['method'] == 'MV'
        assert result['truncation_I'] == '4'
        assert float(result['p_value']) < 0.01

    def test_mv_points_missing_subject(self, panel_files, tmp_path):
        panel = synthetic_panel(n=60, snps=2, grid_size=12, causal=0)
        partial = tmp_path / 'partial.tsv'
        write_curve_matrix(partial, panel.curves.grid.points[:3], panel.subject_ids[1:],
                           panel.curves.values[1:, :3])
        with pytest.raises(CommandError, match='no raw points') as excinfo:
            run(panel_files, '--test', 'snp', '--method', 'MV', '--points', str(partial))
        assert excinfo.value.returncode == 2
