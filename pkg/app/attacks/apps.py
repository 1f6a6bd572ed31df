from django.apps import AppConfig


class AttacksConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'attacks'
