from django.apps import AppConfig


class SimgenConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "simgen"
    verbose_name = "Simulation engine"
