"""Tests for the Lambda drift check."""

import numpy as np
import pytest

from assoc.drift import MODEL_CORRELATED, DriftConfig, alternative_drift_check, expected_drift
from fnspace.grids import TimeGrid
from funcscan_platform.errors import DataError


class TestDriftConfig:
    def test_snp_second_moment(self):
        np.testing.assert_allclose(DriftConfig(maf=0.5).population_second_moment(), np.diag([1.0, 0.5]))

    def test_correlated_second_moment(self):
        sigma = DriftConfig(model=MODEL_CORRELATED, signals=('linear', 'sinusoid')).population_second_moment()
        assert sigma.shape == (4, 4)
        assert sigma[1, 2] == 0.6 and sigma[1, 3] == -0.3
        assert sigma[2, 3] == pytest.approx(-0.18)

    @pytest.mark.parametrize('kwargs', [
        {'model': 'quadratic'},
        {'signals': ('linear', 'normcdf')},
        {'model': MODEL_CORRELATED, 'signals': ('linear',)},
        {'model': MODEL_CORRELATED, 'signals': ('linear', 'normcdf'), 'correlations': (1.0, 0.0)},
        {'reps': 0},
    ])
    def test_rejects_bad_config(self, kwargs):
        with pytest.raises(DataError):
            DriftConfig(**kwargs)


class TestExpectedDrift:
    def test_binomial_half_covariate(self):
        assert expected_drift(DriftConfig(), TimeGrid.uniform(50)) == pytest.approx(0.5 * 0.18 ** 2, abs=5e-4)

    def test_zero_effect(self):
        assert expected_drift(DriftConfig(signals=('null',)), TimeGrid.uniform(50)) == 0.0


class TestDriftCheck:
    def test_null_effect_vanishes(self):
        report = alternative_drift_check(DriftConfig(signals=('null',), sample_sizes=(400,), reps=10))
        assert report.expected == 0.0
        # only the O(1/N) noise term remains
        assert 0 <= report.observed[400] < 0.02

    def test_snp_model_tracks_closed_form(self):
        report = alternative_drift_check(DriftConfig(sample_sizes=(2000,), reps=30, grid_size=30))
        assert report.relative_error(2000) < 0.2
        assert [row['n'] for row in report.as_rows()] == [2000]

    def test_correlated_model_brute_force_agrees(self):
        config = DriftConfig(
            model=MODEL_CORRELATED, signals=('linear', 'normcdf'), sample_sizes=(2000,), reps=4, grid_size=20,
        )
        report = alternative_drift_check(config)
        assert report.brute_force[2000] == pytest.approx(report.expected, rel=0.1)

    def test_deterministic(self):
        config = DriftConfig(sample_sizes=(200,), reps=3, grid_size=10, seed=4)
        assert alternative_drift_check(config).observed == alternative_drift_check(config).observed


@pytest.mark.slow
class TestDriftConvergence:
    def test_snp_model_at_large_n(self):
        report = alternative_drift_check(DriftConfig(sample_sizes=(500, 5000), reps=200))
        assert report.relative_error(5000) < 0.15
        assert report.relative_error(5000) < report.relative_error(500)

    def test_correlated_model(self):
        config = DriftConfig(model=MODEL_CORRELATED, signals=('linear', 'normcdf'), sample_sizes=(5000,), reps=200)
        report = alternative_drift_check(config)
        assert report.relative_error(5000) < 0.15
        assert report.brute_force[5000] == pytest.approx(report.expected, rel=0.02)
