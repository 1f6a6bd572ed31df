from django.apps import AppConfig


class FockspaceConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'fockspace'
