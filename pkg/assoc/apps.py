from django.apps import AppConfig


class AssocConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "assoc"
    verbose_name = "Association tests"
