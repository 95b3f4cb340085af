from django.apps import AppConfig


class ClassicalConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'classical'
    verbose_name = "Rotor pulsé classique"
