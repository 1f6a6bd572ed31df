from django.apps import AppConfig


class FuzzConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'fuzz'
