from django.apps import AppConfig


class QformConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "qform"
    verbose_name = "Weighted chi-square quadratic forms"
