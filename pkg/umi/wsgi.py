"""
WSGI config for the umi project.

Serves the admin site used to browse recorded pipeline runs.
"""

import os

from django.core.wsgi import get_wsgi_application

os.environ.setdefault("DJANGO_SETTINGS_MODULE", "umi.settings")

application = get_wsgi_application()
