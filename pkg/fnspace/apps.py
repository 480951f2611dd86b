from django.apps import AppConfig


class FnspaceConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "fnspace"
    verbose_name = "Function space numerics"
