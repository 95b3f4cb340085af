from django.apps import AppConfig


class QuantumConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'quantum'
    verbose_name = "Trajectoires quantiques"
