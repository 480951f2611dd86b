"""
Tests for API views.

Uses factory_boy for test data.
"""

import pytest
from rest_framework import status
from rest_framework.test import APIClient
from scipy import stats

from scan.factories import ScanHitFactory, ScanRunFactory


@pytest.fixture
def api_client():
    """Return API client."""
    return APIClient()


def results_of(response):
    return response.data.get('results', response.data)


@pytest.mark.django_db
class TestScanRunListAPI:
    """Tests for /api/v1/scan-runs/."""

    def test_list_empty(self, api_client):
        response = api_client.get('/api/v1/scan-runs/')
        assert response.status_code == status.HTTP_200_OK
        assert results_of(response) == []

    def test_list_with_data(self, api_client, scan_run):
        response = api_client.get('/api/v1/scan-runs/')
        assert response.status_code == status.HTTP_200_OK
        results = results_of(response)
        assert len(results) == 1
        assert results[0]['skipped_count'] == 1
        assert results[0]['min_p_value'] == pytest.approx(1e-6)

    def test_filter_by_status(self, api_client):
        ScanRunFactory(status='done')
        ScanRunFactory(status='failed')
        results = results_of(api_client.get('/api/v1/scan-runs/', {'status': 'failed'}))
        assert [r['status'] for r in results] == ['failed']


@pytest.mark.django_db
class TestScanRunDetailAPI:
    """Tests for /api/v1/scan-runs/<pk>/."""

    def test_detail(self, api_client, scan_run):
        response = api_client.get(f'/api/v1/scan-runs/{scan_run.pk}/')
        assert response.status_code == status.HTTP_200_OK
        assert response.data['config'] == scan_run.config
        assert response.data['tested_count'] == 2

    def test_missing(self, api_client):
        assert api_client.get('/api/v1/scan-runs/999/').status_code == status.HTTP_404_NOT_FOUND


@pytest.mark.django_db
class TestScanHitListAPI:
    """Tests for /api/v1/scan-runs/<pk>/hits/."""

    def test_ordered_by_p_value(self, api_client, scan_run):
        response = api_client.get(f'/api/v1/scan-runs/{scan_run.pk}/hits/')
        assert response.status_code == status.HTTP_200_OK
        assert [h['snp_id'] for h in results_of(response)] == ['rs1', 'rs2', 'rs3']

    def test_filter_by_status_and_threshold(self, api_client, scan_run):
        ok = results_of(api_client.get(f'/api/v1/scan-runs/{scan_run.pk}/hits/', {'status': 'ok'}))
        assert [h['snp_id'] for h in ok] == ['rs1', 'rs2']
        strong = results_of(api_client.get(f'/api/v1/scan-runs/{scan_run.pk}/hits/', {'max_p': '1e-4'}))
        assert [h['snp_id'] for h in strong] == ['rs1']

    def test_bad_threshold(self, api_client, scan_run):
        response = api_client.get(f'/api/v1/scan-runs/{scan_run.pk}/hits/', {'max_p': 'small'})
        assert response.status_code == status.HTTP_400_BAD_REQUEST

    def test_hits_of_other_runs_are_excluded(self, api_client, scan_run):
        ScanHitFactory(run=ScanRunFactory(), snp_id='rs99')
        snps = [h['snp_id'] for h in results_of(api_client.get(f'/api/v1/scan-runs/{scan_run.pk}/hits/'))]
        assert 'rs99' not in snps

    def test_unknown_run(self, api_client):
        assert api_client.get('/api/v1/scan-runs/999/hits/').status_code == status.HTTP_404_NOT_FOUND


@pytest.mark.django_db
class TestPValueAPI:
    """Tests for POST /api/v1/pvalue/."""

    def test_requires_authentication(self, api_client):
        response = api_client.post('/api/v1/pvalue/', {'weights': [1.0], 'statistic': 1.0}, format='json')
        assert response.status_code in (status.HTTP_401_UNAUTHORIZED, status.HTTP_403_FORBIDDEN)

    def test_single_weight_is_chi_square(self, api_client, user):
        api_client.force_authenticate(user)
        response = api_client.post('/api/v1/pvalue/', {'weights': [2.0], 'df': 2, 'statistic': 5.0}, format='json')
        assert response.status_code == status.HTTP_200_OK
        assert response.data['p_value'] == pytest.approx(stats.chi2.sf(2.5, 2), rel=1e-12)
        assert response.data['method'] == 'chi2'

    def test_weighted_sum(self, api_client, user):
        api_client.force_authenticate(user)
        response = api_client.post('/api/v1/pvalue/', {'weights': [1.0, 0.5, 0.0], 'statistic': 3.0}, format='json')
        assert response.status_code == status.HTTP_200_OK
        assert response.data['terms'] == 2
        assert response.data['converged'] is True
        assert 0 < response.data['p_value'] < 1

    @pytest.mark.parametrize('payload', [
        {'weights': [], 'statistic': 1.0},
        {'weights': [0.0, 0.0], 'statistic': 1.0},
        {'weights': [1.0, -1.0], 'statistic': 1.0},
        {'weights': [1.0], 'statistic': -2.0},
        {'weights': [1.0], 'df': 0, 'statistic': 1.0},
    ])
    def test_invalid_payloads(self, api_client, user, payload):
        api_client.force_authenticate(user)
        response = api_client.post('/api/v1/pvalue/', payload, format='json')
        assert response.status_code == status.HTTP_400_BAD_REQUEST


@pytest.mark.django_db
class TestTokenAPI:
    def test_obtain_token_and_call_pvalue(self, api_client, user):
        response = api_client.post(
            '/api/v1/token/', {'username': 'analyst', 'password': 'testpass123'}, format='json',
        )
        assert response.status_code == status.HTTP_200_OK
        api_client.credentials(HTTP_AUTHORIZATION=f'Bearer {response.data["access"]}')
        response = api_client.post('/api/v1/pvalue/', {'weights': [1.0], 'statistic': 3.841459}, format='json')
        assert response.status_code == status.HTTP_200_OK
        assert response.data['p_value'] == pytest.approx(0.05, abs=1e-4)


@pytest.mark.django_db
def test_schema_is_served(api_client):
    response = api_client.get('/api/schema/')
    assert response.status_code == status.HTTP_200_OK
