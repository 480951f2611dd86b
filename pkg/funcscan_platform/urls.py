"""
URL configuration for funcscan_platform.

Routes:
- /admin/          stored scan runs and hits
- /api/            REST API (scan runs, hits, p-value calculator, JWT)
- /api/schema/     OpenAPI schema, /api/docs/ Swagger UI
- /healthz/, /readyz/
"""

from django.contrib import admin
from django.urls import include, path
from drf_spectacular.views import SpectacularAPIView, SpectacularSwaggerView

from .health import healthz, readyz

urlpatterns = [
    path('admin/', admin.site.urls),
    path('api/', include('api.urls')),
    path('api/schema/', SpectacularAPIView.as_view(), name='schema'),
    path('api/docs/', SpectacularSwaggerView.as_view(url_name='schema'), name='swagger-ui'),
    path('healthz/', healthz, name='healthz'),
    path('readyz/', readyz, name='readyz'),
]
