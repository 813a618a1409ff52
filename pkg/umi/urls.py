"""URL configuration for the umi project.

Only the admin is routed; it lists recorded pipeline runs.
"""

from django.contrib import admin
from django.urls import path

urlpatterns = [
    path("admin/", admin.site.urls),
]
