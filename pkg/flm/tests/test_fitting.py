"""Tests for flm.design and flm.fitting."""

import numpy as np
import pytest

from fnspace.grids import CurveSet, Kernel, TimeGrid, hilbert_schmidt_distance
from flm.design import ColumnRole, DesignMatrix
from flm.fitting import fit, reduction_statistic, schur_complement
from funcscan_platform.errors import DataError, InsufficientSamples, RankDeficient, SingularBlock
from simgen.matern import MaternSpec, covariance_matrix, draw_error_curves


def _random_problem(rng, n=40, t=15, adjust=2, test=1):
    grid = TimeGrid(np.sort(rng.uniform(0, 1, t)))
    design = DesignMatrix.build(
        adjust={f'a{i}': rng.normal(size=n) for i in range(adjust)},
        test={f'x{i}': rng.normal(size=n) for i in range(test)},
    )
    curves = CurveSet(grid, rng.normal(size=(n, t)))
    return curves, design


class TestDesignMatrix:
    def test_build_assigns_roles(self):
        design = DesignMatrix.build(adjust={'age': np.arange(5.0)}, test={'snp': [0, 1, 2, 1, 0]})
        assert design.names == ('intercept', 'age', 'snp')
        assert design.roles == (ColumnRole.INTERCEPT, ColumnRole.ADJUST, ColumnRole.TEST)
        assert design.test_count == 1
        assert design.null_design().names == ('intercept', 'age')

    def test_too_few_rows(self):
        with pytest.raises(InsufficientSamples):
            DesignMatrix.build(adjust={'age': [1.0, 2.0]}, test={'snp': [0.0, 1.0]})

    def test_intercept_must_be_ones(self):
        with pytest.raises(DataError):
            DesignMatrix(np.array([[1.0], [2.0], [1.0]]), ('intercept',), ('intercept',))

    def test_with_test_columns_replaces_block(self):
        design = DesignMatrix.build(adjust={'age': np.arange(6.0)}, test={'snp': np.zeros(6)})
        swapped = design.with_test_columns(np.ones((6, 2)) * [[1, 2]], ['g1', 'g2'])
        assert swapped.names == ('intercept', 'age', 'g1', 'g2')
        assert swapped.test_count == 2


class TestFit:
    def test_zero_response(self):
        rng = np.random.default_rng(1)
        _, design = _random_problem(rng)
        result = fit(CurveSet(TimeGrid.uniform(15), np.zeros((40, 15))), design)
        assert np.all(result.coefficients == 0)
        assert np.all(result.residual_cov.values == 0)
        assert np.all(result.spectrum.eigenvalues == 0)

    def test_intercept_only_gives_mean_curve(self):
        rng = np.random.default_rng(2)
        curves = CurveSet(TimeGrid.uniform(9), rng.normal(size=(12, 9)))
        design = DesignMatrix.build(rows=12)
        result = fit(curves, design)
        assert np.allclose(result.coefficient('intercept').values, curves.values.mean(axis=0))

    def test_two_subject_centred_covariate(self):
        grid = TimeGrid.uniform(11)
        curves = CurveSet(grid, np.vstack([grid.points, -grid.points]))
        design = DesignMatrix.build(test={'x': np.array([1.0, -1.0])}, intercept=False)
        result = fit(curves, design)
        assert np.allclose(result.coefficient('x').values, grid.points)
        assert np.allclose(result.residuals, 0.0)
        assert result.dof_divisor == 1

    def test_normal_equations_hold(self):
        rng = np.random.default_rng(3)
        curves, design = _random_problem(rng, test=2)
        result = fit(curves, design)
        cross = design.values.T @ result.residuals
        assert np.max(np.abs(cross)) <= 1e-8 * np.max(np.abs(design.values.T @ curves.values))

    def test_divisor_is_n_minus_columns(self):
        rng = np.random.default_rng(4)
        curves, design = _random_problem(rng, n=30, adjust=3, test=2)
        assert fit(curves, design).dof_divisor == 30 - 1 - 3 - 2

    def test_spectrum_is_nonnegative_and_descending(self):
        rng = np.random.default_rng(5)
        curves, design = _random_problem(rng)
        eigenvalues = fit(curves, design).spectrum.eigenvalues
        assert np.all(eigenvalues >= 0)
        assert np.all(np.diff(eigenvalues) <= 0)

    def test_constant_test_column_is_rank_deficient(self):
        rng = np.random.default_rng(6)
        curves, _ = _random_problem(rng)
        design = DesignMatrix.build(adjust={'age': rng.normal(size=40)}, test={'snp': np.full(40, 2.0)})
        with pytest.raises(RankDeficient) as excinfo:
            fit(curves, design)
        assert set(excinfo.value.columns) & {'intercept', 'snp'}

    def test_collinear_columns_are_named(self):
        rng = np.random.default_rng(7)
        curves, _ = _random_problem(rng)
        age = rng.normal(size=40)
        design = DesignMatrix.build(adjust={'age': age, 'noise': rng.normal(size=40)}, test={'age2': 3 * age})
        with pytest.raises(RankDeficient) as excinfo:
            fit(curves, design)
        assert set(excinfo.value.columns) & {'age', 'age2'}

    def test_row_count_mismatch(self):
        rng = np.random.default_rng(8)
        curves, design = _random_problem(rng)
        with pytest.raises(DataError):
            fit(curves.subset(range(10)), design)

    def test_nesting_never_decreases_rss(self):
        rng = np.random.default_rng(9)
        for _ in range(20):
            curves, design = _random_problem(rng, adjust=2, test=2)
            full = fit(curves, design, spectrum=False).residual_sum_of_norms
            for keep in ([0], [0, 1], [0, 2, 4], [0, 1, 2, 3]):
                smaller = fit(curves, design.select(keep), spectrum=False).residual_sum_of_norms
                assert smaller >= full - 1e-10 * full

    def test_standard_errors_shape(self):
        rng = np.random.default_rng(10)
        curves, design = _random_problem(rng)
        errors = fit(curves, design).standard_errors()
        assert errors.shape == (design.columns, curves.grid.size)
        assert np.all(errors > 0)


class TestReductionStatistic:
    def test_matches_difference_of_fits(self):
        rng = np.random.default_rng(11)
        for test in (1, 3):
            curves, design = _random_problem(rng, test=test)
            null = fit(curves, design.null_design(), spectrum=False)
            full = fit(curves, design, spectrum=False)
            expected = null.residual_sum_of_norms - full.residual_sum_of_norms
            assert reduction_statistic(null, design.test_block()) == pytest.approx(expected, rel=1e-9)

    def test_collinear_test_column(self):
        rng = np.random.default_rng(12)
        curves, design = _random_problem(rng)
        null = fit(curves, design.null_design(), spectrum=False)
        with pytest.raises(RankDeficient):
            reduction_statistic(null, 2 * design.column('a0') + 1)


class TestSchurComplement:
    def test_identity(self):
        assert np.allclose(schur_complement(np.eye(5), 2), np.eye(3))

    def test_two_by_two(self):
        assert schur_complement([[2.0, 1.0], [1.0, 2.0]], 1) == pytest.approx([[1.5]])

    def test_block_diagonal(self):
        sigma = np.zeros((4, 4))
        sigma[:2, :2] = [[2.0, 0.3], [0.3, 1.0]]
        sigma[2:, 2:] = [[4.0, 1.0], [1.0, 3.0]]
        assert np.allclose(schur_complement(sigma, 2), sigma[2:, 2:])

    def test_singular_leading_block(self):
        sigma = np.array([[1.0, 1.0, 0.0], [1.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
        with pytest.raises(SingularBlock):
            schur_complement(sigma, 2)

    def test_matches_residualised_covariance(self):
        rng = np.random.default_rng(13)
        n = 5000
        z = rng.normal(size=n)
        design = DesignMatrix.build(adjust={'z': z}, test={'x1': 0.6 * z + rng.normal(size=n),
                                                           'x2': -0.3 * z + rng.normal(size=n)})
        complement = schur_complement(design.second_moment(), 2)
        x1 = design.null_design().values
        x2 = design.test_block()
        residual = x2 - x1 @ np.linalg.lstsq(x1, x2, rcond=None)[0]
        assert np.allclose(complement, residual.T @ residual / n, atol=1e-10)


class TestCovarianceConsistency:
    @pytest.mark.slow
    def test_estimate_improves_with_sample_size(self):
        grid = TimeGrid.uniform(20)
        spec = MaternSpec()
        truth = Kernel(grid, covariance_matrix(grid, spec))
        wins = 0
        for seed in range(40):
            distances = []
            for n in (200, 2000):
                errors = draw_error_curves(grid, spec, n, seed=(seed, n))
                design = DesignMatrix.build(rows=n)
                estimate = fit(errors, design, spectrum=False).residual_cov
                distances.append(hilbert_schmidt_distance(estimate, truth))
            wins += distances[1] < distances[0]
        assert wins >= 38
