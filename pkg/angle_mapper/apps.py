from django.apps import AppConfig


class AngleMapperConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'angle_mapper'
