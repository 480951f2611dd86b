"""API views."""

from drf_spectacular.utils import OpenApiParameter, extend_schema
from rest_framework import generics, status
from rest_framework.exceptions import ValidationError
from rest_framework.permissions import IsAuthenticatedOrReadOnly
from rest_framework.response import Response
from rest_framework.views import APIView

from qform.imhof import imhof_survival
from scan.models import ScanHit, ScanRun

from .serializers import (
    PValueRequestSerializer,
    PValueResponseSerializer,
    ScanHitSerializer,
    ScanRunDetailSerializer,
    ScanRunListSerializer,
)


class ScanRunListAPIView(generics.ListAPIView):
    """List stored scan runs, optionally filtered by status."""

    serializer_class = ScanRunListSerializer
    permission_classes = [IsAuthenticatedOrReadOnly]

    def get_queryset(self):
        qs = ScanRun.objects.order_by('-created_at')
        run_status = self.request.query_params.get('status')
        if run_status:
            qs = qs.filter(status=run_status)
        return qs


class ScanRunDetailAPIView(generics.RetrieveAPIView):
    """Retrieve a single scan run."""

    queryset = ScanRun.objects.all()
    serializer_class = ScanRunDetailSerializer
    permission_classes = [IsAuthenticatedOrReadOnly]


@extend_schema(parameters=[
    OpenApiParameter('status', str, description='Only hits with this status (ok, skipped_maf, ...).'),
    OpenApiParameter('max_p', float, description='Only hits with p_value <= max_p.'),
])
class ScanHitListAPIView(generics.ListAPIView):
    """Hits of one run, smallest p-value first."""

    serializer_class = ScanHitSerializer
    permission_classes = [IsAuthenticatedOrReadOnly]

    def get_queryset(self):
        run = generics.get_object_or_404(ScanRun, pk=self.kwargs['pk'])
        qs = ScanHit.objects.filter(run=run).order_by('p_value', 'id')
        hit_status = self.request.query_params.get('status')
        if hit_status:
            qs = qs.filter(status=hit_status)
        max_p = self.request.query_params.get('max_p')
        if max_p is not None:
            try:
                qs = qs.filter(p_value__lte=float(max_p))
            except ValueError:
                raise ValidationError({'max_p': 'A number is required.'}) from None
        return qs


class PValueAPIView(APIView):
    """P(sum w_i chi2_i(df) > statistic) by Imhof inversion."""

    permission_classes = [IsAuthenticatedOrReadOnly]

    @extend_schema(request=PValueRequestSerializer, responses=PValueResponseSerializer)
    def post(self, request):
        serializer = PValueRequestSerializer(data=request.data)
        serializer.is_valid(raise_exception=True)
        dist = serializer.distribution()
        result = imhof_survival(dist, serializer.validated_data['statistic'])
        payload = PValueResponseSerializer({
            'p_value': result.probability,
            'error_bound': result.error_bound,
            'converged': result.converged,
            'method': result.method,
            'terms': dist.terms,
        })
        return Response(payload.data, status=status.HTTP_200_OK)
