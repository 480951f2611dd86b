"""API serializers."""

import numpy as np
from rest_framework import serializers

from qform.imhof import WeightedChiSq
from scan.models import ScanHit, ScanRun


class ScanRunListSerializer(serializers.ModelSerializer):
    """Serializer for ScanRun list (summary fields)."""

    skipped_count = serializers.IntegerField(read_only=True)

    class Meta:
        model = ScanRun
        fields = [
            'id', 'name', 'status', 'snp_count', 'tested_count', 'skipped_count',
            'min_p_value', 'created_at', 'finished_at',
        ]


class ScanRunDetailSerializer(serializers.ModelSerializer):
    """Serializer for ScanRun detail."""

    skipped_count = serializers.IntegerField(read_only=True)

    class Meta:
        model = ScanRun
        fields = [
            'id', 'name', 'status', 'config', 'curves_path', 'covariates_path', 'genotypes_path',
            'snp_map_path', 'output_path', 'snp_count', 'tested_count', 'skipped_count', 'min_p_value',
            'error_message', 'created_at', 'started_at', 'finished_at',
        ]


class ScanHitSerializer(serializers.ModelSerializer):
    """Serializer for one stored scan record."""

    class Meta:
        model = ScanHit
        fields = [
            'snp_id', 'chromosome', 'position', 'maf', 'n_used', 'statistic', 'p_value',
            'truncation_i', 'status', 'null_spectrum',
        ]


class PValueRequestSerializer(serializers.Serializer):
    """Weights, df and statistic for a weighted chi-square tail probability."""

    weights = serializers.ListField(child=serializers.FloatField(min_value=0.0), allow_empty=False)
    df = serializers.IntegerField(min_value=1, default=1)
    statistic = serializers.FloatField(min_value=0.0)

    def validate_weights(self, value):
        if not any(v > 0 for v in value):
            raise serializers.ValidationError('At least one weight must be positive.')
        return value

    def distribution(self):
        return WeightedChiSq(np.asarray(self.validated_data['weights']), self.validated_data['df'])


class PValueResponseSerializer(serializers.Serializer):
    p_value = serializers.FloatField()
    error_bound = serializers.FloatField()
    converged = serializers.BooleanField()
    method = serializers.CharField()
    terms = serializers.IntegerField()
