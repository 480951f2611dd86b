"""API URL configuration."""

from django.urls import path

from rest_framework_simplejwt.views import TokenObtainPairView, TokenRefreshView

from . import views

app_name = 'api'

urlpatterns = [
    # JWT auth
    path('v1/token/', TokenObtainPairView.as_view(), name='token_obtain_pair'),
    path('v1/token/refresh/', TokenRefreshView.as_view(), name='token_refresh'),
    path('v1/scan-runs/', views.ScanRunListAPIView.as_view(), name='scanrun-list'),
    path('v1/scan-runs/<int:pk>/', views.ScanRunDetailAPIView.as_view(), name='scanrun-detail'),
    path('v1/scan-runs/<int:pk>/hits/', views.ScanHitListAPIView.as_view(), name='scanhit-list'),
    path('v1/pvalue/', views.PValueAPIView.as_view(), name='pvalue'),
]
