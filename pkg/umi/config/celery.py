import os

from celery import Celery

# Set the default Django settings module to 'umi.settings'
os.environ.setdefault("DJANGO_SETTINGS_MODULE", "umi.settings")

app = Celery("umi")

# Load config from Django settings, namespace='CELERY' means keys must start with CELERY_
app.config_from_object("django.conf:settings", namespace="CELERY")

# Load task modules from all registered Django apps.
app.autodiscover_tasks()
