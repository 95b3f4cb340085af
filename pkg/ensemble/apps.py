from django.apps import AppConfig


class EnsembleAppConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'ensemble'
    verbose_name = "Ensembles de trajectoires"
