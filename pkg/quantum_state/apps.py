from django.apps import AppConfig


class QuantumStateConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'quantum_state'
