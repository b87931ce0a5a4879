from django.apps import AppConfig


class MeanFieldConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'mean_field'
