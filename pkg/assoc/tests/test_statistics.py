"""Tests for assoc.statistics."""

import numpy as np
import pytest
from scipy import stats

from assoc.statistics import (
    Method,
    WeightRule,
    endpoint_test,
    lambda_test,
    mv_test,
    pc_adaptive_test,
    pc_test,
    shared_null_lambda_test,
    weighted_test,
)
from flm.design import DesignMatrix
from flm.fitting import fit, reduction_statistic
from fnspace.grids import CurveSet, TimeGrid
from funcscan_platform.errors import (
    DataError,
    InsufficientSamples,
    InvalidWeights,
    RankDeficient,
    TooManyComponents,
)
from qform.imhof import WeightedChiSq, imhof_survival
from simgen.matern import MaternSpec, draw_error_curves
from simgen.signals import signal_curve


def standardized(x):
    x = np.asarray(x, dtype=float) - np.mean(x)
    return x / np.sqrt(np.mean(x ** 2))


def problem(seed, n=60, t=12, adjust=1, test=1, effect=0.0):
    rng = np.random.default_rng(seed)
    grid = TimeGrid.uniform(t)
    design = DesignMatrix.build(
        adjust={f'a{i}': rng.normal(size=n) for i in range(adjust)},
        test={f'x{i}': rng.normal(size=n) for i in range(test)},
    )
    errors = draw_error_curves(grid, MaternSpec(), n, seed)
    signal = signal_curve('normcdf', grid).values
    values = errors.values + effect * np.outer(design.test_block().sum(axis=1), signal)
    return CurveSet(grid, values), design


def hat(x):
    return x @ np.linalg.pinv(x)


class TestLambdaTest:
    def test_zero_response(self):
        _, design = problem(0)
        curves = CurveSet(TimeGrid.uniform(12), np.zeros((design.rows, 12)))
        result = lambda_test(curves, design)
        assert result.statistic == 0.0
        assert result.p_value == 1.0

    def test_result_fields(self):
        curves, design = problem(1, test=2)
        result = lambda_test(curves, design)
        assert result.method is Method.L2
        assert result.df_per_term == 2
        assert result.statistic >= 0
        assert 0 <= result.p_value <= 1
        assert result.truncation_I == result.weights_used.size >= 1

    def test_standardized_single_covariate_equals_n_beta_norm(self):
        rng = np.random.default_rng(2)
        n = 80
        grid = TimeGrid.uniform(20)
        x = standardized(rng.normal(size=n))
        curves = CurveSet(grid, draw_error_curves(grid, MaternSpec(), n, 2).values + 0.3 * np.outer(x, grid.points))
        result = lambda_test(curves, DesignMatrix.build(test={'x': x}))
        beta = result.fit.coefficient('x').values
        expected = n * np.sum(grid.weights * beta ** 2)
        assert result.statistic == pytest.approx(expected, rel=1e-10)

    def test_matches_hat_matrix_projection(self):
        rng = np.random.default_rng(3)
        n, t = 15, 60
        grid = TimeGrid.uniform(t)
        design = DesignMatrix.build(adjust={'a': rng.normal(size=n)}, test={'x': rng.normal(size=n)})
        # beta_1 != 0, beta_2 == 0
        eps = rng.normal(size=(n, t))
        values = design.null_design().values @ rng.normal(size=(2, t)) + eps
        result = lambda_test(CurveSet(grid, values), design)
        projector = hat(design.values) - hat(design.null_design().values)
        expected = float(np.sum(grid.weights * np.einsum('nt,nm,mt->t', eps, projector, eps)))
        assert result.statistic == pytest.approx(expected, rel=1e-8)

    def test_invariant_under_recombined_test_columns(self):
        curves, design = problem(4, test=2, effect=0.5)
        block = design.test_block() @ np.array([[2.0, 1.0], [0.5, -1.0]])
        recombined = design.with_test_columns(block, ('u', 'v'))
        first, second = lambda_test(curves, design), lambda_test(curves, recombined)
        assert second.statistic == pytest.approx(first.statistic, rel=1e-8)
        assert second.p_value == pytest.approx(first.p_value, rel=1e-6, abs=1e-12)

    def test_constant_test_column_is_rank_deficient(self):
        curves, design = problem(5)
        with pytest.raises(RankDeficient):
            lambda_test(curves, design.with_test_columns(np.ones(design.rows), ('flat',)))

    def test_requires_test_columns(self):
        curves, design = problem(6)
        with pytest.raises(DataError):
            lambda_test(curves, design.null_design())

    def test_strong_signal_rejects(self):
        curves, design = problem(7, n=120, effect=3.0)
        assert lambda_test(curves, design).p_value < 1e-6

    def test_precomputed_null_fit(self):
        curves, design = problem(8)
        null = fit(curves, design.null_design(), covariance=False, spectrum=False)
        direct = lambda_test(curves, design)
        reused = lambda_test(curves, design, null_fit=null)
        assert reused.statistic == pytest.approx(direct.statistic, rel=1e-12)
        assert reused.p_value == pytest.approx(direct.p_value, rel=1e-12)

    def test_mismatched_null_fit(self):
        curves, design = problem(9, adjust=2)
        wrong = fit(curves, DesignMatrix.build(rows=design.rows), covariance=False, spectrum=False)
        with pytest.raises(DataError, match='null fit'):
            lambda_test(curves, design, null_fit=wrong)


class TestDiagnostics:
    def test_reductions_sum_to_lambda(self):
        curves, design = problem(10, t=15)
        result = lambda_test(curves, design)
        assert np.sum(result.diagnostics.reductions) == pytest.approx(result.statistic, rel=1e-10)

    def test_r_squared_identity_on_standardized_design(self):
        rng = np.random.default_rng(11)
        n = 70
        grid = TimeGrid.uniform(15)
        x = standardized(rng.normal(size=n))
        errors = draw_error_curves(grid, MaternSpec(), n, 11).values
        curves = CurveSet(grid, errors + np.outer(x, signal_curve('linear', grid).values))
        diagnostics = lambda_test(curves, DesignMatrix.build(test={'x': x})).diagnostics
        positive = diagnostics.eigenvalues > 1e-10 * diagnostics.eigenvalues[0]
        identity = diagnostics.projections[positive] ** 2 / diagnostics.eigenvalues[positive]
        np.testing.assert_allclose(diagnostics.r_squared[positive], identity, rtol=1e-8)

    def test_reductions_match_score_regressions(self):
        curves, design = problem(12, t=10)
        result = lambda_test(curves, design)
        scores = result.fit.spectrum.scores(curves)
        null_x, full_x = design.null_design().values, design.values

        def rss(x):
            residual = scores - x @ np.linalg.lstsq(x, scores, rcond=None)[0]
            return np.sum(residual ** 2, axis=0)

        np.testing.assert_allclose(result.diagnostics.reductions, rss(null_x) - rss(full_x), rtol=1e-8, atol=1e-10)

    def test_r_squared_nonnegative(self):
        curves, design = problem(13, test=2)
        assert np.all(lambda_test(curves, design).diagnostics.r_squared >= 0)


class TestPcTests:
    def test_pc_test_fields(self):
        curves, design = problem(20)
        result = pc_test(curves, design, 3)
        assert result.method is Method.PC_FIXED
        assert result.truncation_I == 3
        assert 'wilks' in result.extra

    def test_single_component_matches_f_test(self):
        curves, design = problem(21, adjust=0)
        result = pc_test(curves, design, 1)
        response = result.fit.spectrum.scores(curves)[:, 0]
        x = design.values
        rss_full = np.sum((response - hat(x) @ response) ** 2)
        rss_null = np.sum((response - response.mean()) ** 2)
        df = design.rows - design.columns
        f_value = (rss_null - rss_full) / (rss_full / df)
        assert result.p_value == pytest.approx(stats.f.sf(f_value, 1, df), rel=1e-8)

    def test_too_many_components(self):
        curves, design = problem(22, t=6)
        with pytest.raises(TooManyComponents):
            pc_test(curves, design, 7)

    def test_strong_aligned_signal(self):
        curves, design = problem(23, n=100, effect=5.0)
        assert pc_test(curves, design, 1).p_value < 1e-6
        assert lambda_test(curves, design).p_value < 0.05

    def test_adaptive_takes_largest_p_value(self):
        curves, design = problem(24, effect=0.4)
        result = pc_adaptive_test(curves, design)
        candidates = result.extra['candidates']
        assert set(candidates) == {3, 4, 5}
        assert result.p_value == pytest.approx(max(candidates.values()))
        assert result.method is Method.PC

    def test_adaptive_drops_infeasible_counts(self):
        curves, design = problem(25, t=4)
        assert set(pc_adaptive_test(curves, design).extra['candidates']) == {3, 4}

    def test_adaptive_with_nothing_feasible(self):
        curves, design = problem(26, t=2)
        with pytest.raises(TooManyComponents):
            pc_adaptive_test(curves, design)

    def test_multiple_test_columns(self):
        curves, design = problem(27, test=3)
        result = pc_test(curves, design, 4)
        assert result.df_per_term == 3
        assert 0 <= result.p_value <= 1


class TestWeightedTest:
    @pytest.mark.parametrize('seed', range(20))
    def test_eigenvalue_weights_reproduce_lambda(self, seed):
        curves, design = problem(100 + seed, t=10)
        weighted = weighted_test(curves, design, WeightRule.eigenvalue())
        plain = lambda_test(curves, design)
        assert weighted.statistic == pytest.approx(plain.statistic, rel=1e-8)
        assert weighted.p_value == pytest.approx(plain.p_value, rel=1e-8, abs=1e-14)

    @pytest.mark.parametrize('seed', range(20))
    def test_indicator_weights_reproduce_pc_statistic(self, seed):
        curves, design = problem(200 + seed, t=10)
        weighted = weighted_test(curves, design, WeightRule.indicator(4))
        assert weighted.statistic == pytest.approx(pc_test(curves, design, 4).statistic, rel=1e-8)
        assert weighted.truncation_I == 4

    def test_zero_weights(self):
        curves, design = problem(30)
        result = weighted_test(curves, design, [0.0, 0.0, 0.0])
        assert result.statistic == 0.0
        assert result.p_value == 1.0

    def test_explicit_weights_pvalue(self):
        curves, design = problem(31, effect=0.3)
        result = weighted_test(curves, design, [1.0, 0.5])
        assert result.truncation_I == 2
        expected = imhof_survival(WeightedChiSq([1.0, 0.5], 1), result.statistic).probability
        assert result.p_value == pytest.approx(expected, rel=1e-9)

    def test_negative_weights(self):
        with pytest.raises(InvalidWeights):
            WeightRule.explicit([1.0, -0.5])

    def test_too_many_explicit_weights(self):
        curves, design = problem(32, t=4)
        with pytest.raises(InvalidWeights):
            weighted_test(curves, design, np.ones(5))

    def test_unknown_rule_name(self):
        with pytest.raises(InvalidWeights):
            WeightRule.coerce('uniform')

    def test_indicator_beyond_spectrum(self):
        curves, design = problem(33, t=4)
        with pytest.raises(TooManyComponents):
            weighted_test(curves, design, WeightRule.indicator(5))


class TestMultivariateTests:
    def test_single_point_matches_f_oracle(self):
        curves, design = problem(40, adjust=2)
        y = curves.values[:, 5]
        result = mv_test(y, design)
        x, x1 = design.values, design.null_design().values
        rss_full = np.sum((y - hat(x) @ y) ** 2)
        rss_null = np.sum((y - hat(x1) @ y) ** 2)
        df = design.rows - design.columns
        f_value = (rss_null - rss_full) / (rss_full / df)
        assert result.p_value == pytest.approx(stats.f.sf(f_value, 1, df), rel=1e-10)
        assert result.method is Method.MV

    def test_multivariate_response(self):
        curves, design = problem(41, effect=2.0)
        result = mv_test(curves.values[:, ::3], design)
        assert result.truncation_I == 4
        assert 0 < result.statistic < 1
        assert result.p_value < 0.01

    def test_too_many_points(self):
        curves, design = problem(42, n=12, t=10)
        with pytest.raises(InsufficientSamples):
            mv_test(curves.values, design)

    def test_row_mismatch(self):
        curves, design = problem(43)
        with pytest.raises(DataError):
            mv_test(curves.values[:-1, :3], design)

    def test_endpoint_equals_change_score_f_test(self):
        curves, design = problem(44)
        change = curves.values[:, -1] - curves.values[:, 0]
        assert endpoint_test(curves, design).p_value == pytest.approx(mv_test(change, design).p_value, rel=1e-12)


class TestSharedNullLambda:
    def test_statistic_matches_per_snp(self):
        curves, design = problem(50)
        null = fit(curves, design.null_design())
        shared = shared_null_lambda_test(null, design.test_block())
        assert shared.statistic == pytest.approx(lambda_test(curves, design).statistic, rel=1e-10)
        assert shared.extra['null_spectrum'] == 'shared'
        assert 0 <= shared.p_value <= 1


def null_rejection_rate(test, reps, seed, n=200, m=10):
    grid = TimeGrid(np.linspace(1.0 / m, 1.0, m))
    rejections = 0
    for replicate in range(reps):
        rng = np.random.default_rng((seed, replicate))
        x = rng.binomial(2, 0.5, size=n) - 1.0
        curves = draw_error_curves(grid, MaternSpec(), n, (seed, replicate, 0))
        rejections += test(curves, DesignMatrix.build(test={'snp': x})).p_value < 0.05
    return rejections / reps


@pytest.mark.slow
class TestCalibration:
    # exact binomial 99% interval around 0.05 for 1000 replicates
    BAND = (0.035, 0.065)

    def test_lambda(self):
        rate = null_rejection_rate(lambda_test, 1000, seed=1)
        assert self.BAND[0] <= rate <= self.BAND[1]

    def test_pc5(self):
        rate = null_rejection_rate(lambda c, d: pc_test(c, d, 5), 1000, seed=2)
        assert self.BAND[0] <= rate <= self.BAND[1]

    def test_adaptive_pc_is_conservative(self):
        reps = 1000
        assert null_rejection_rate(pc_adaptive_test, reps, seed=3) <= 0.05 + 2 * np.sqrt(0.05 * 0.95 / reps)

    def test_mv(self):
        rate = null_rejection_rate(lambda c, d: mv_test(c.values, d), 1000, seed=4)
        assert self.BAND[0] <= rate <= self.BAND[1]

    def test_null_distribution_matches_imhof(self):
        n, reps = 30, 10_000
        grid = TimeGrid.uniform(40)
        spectrum = np.array([1.0, 0.4, 0.1])
        basis = np.vstack([np.sqrt(2.0) * np.sin(np.pi * (j + 1) * grid.points) for j in range(3)])
        gram = (basis * grid.weights) @ basis.T
        basis = np.linalg.solve(np.linalg.cholesky(gram), basis)
        dist = WeightedChiSq(spectrum, 1)
        rng = np.random.default_rng(8)
        p_values = []
        for _ in range(reps):
            x = rng.normal(size=n)
            scores = rng.normal(size=(n, 3)) * np.sqrt(spectrum)
            curves = CurveSet(grid, scores @ basis)
            design = DesignMatrix.build(test={'x': x})
            null = fit(curves, design.null_design(), covariance=False, spectrum=False)
            p_values.append(imhof_survival(dist, reduction_statistic(null, design.test_block())).probability)
        p_values = np.array(p_values)
        for level in (0.5, 0.1, 0.01):
            se = np.sqrt(level * (1 - level) / reps)
            assert abs(np.mean(p_values < level) - level) < 3 * se
