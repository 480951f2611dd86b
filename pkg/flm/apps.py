from django.apps import AppConfig


class FlmConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "flm"
    verbose_name = "Functional linear models"
