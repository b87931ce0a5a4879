import os
from celery import Celery

# Set default Django settings module so Celery knows where Django config is
os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'FerroWriterBackend.settings')

app = Celery('FerroWriterBackend')

# Only settings prefixed with "CELERY_" are applied
app.config_from_object('django.conf:settings', namespace='CELERY')

# Picks up experiments/tasks.py
app.autodiscover_tasks()
