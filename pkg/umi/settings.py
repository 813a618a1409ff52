"""
Django settings for the umi project.

Every tunable of the imaging pipeline is read from the environment (or an
optional ``.env`` file at the repository root) through django-environ.
"""

from pathlib import Path

import environ

env = environ.Env(
    DEBUG=(bool, False),
)

BASE_DIR = Path(__file__).resolve().parent.parent

env_file = BASE_DIR / ".env"
if env_file.exists():
    environ.Env.read_env(str(env_file))

# Only the admin is served; a dev default keeps local runs working without a .env.
SECRET_KEY = env("SECRET_KEY", default="change-me-in-env")

DEBUG = env("DEBUG", default=False)

ALLOWED_HOSTS = env.list("ALLOWED_HOSTS", default=["127.0.0.1", "localhost"])


# Application definition

INSTALLED_APPS = [
    "django.contrib.admin",
    "django.contrib.auth",
    "django.contrib.contenttypes",
    "django.contrib.sessions",
    "django.contrib.messages",
    "django.contrib.staticfiles",
    "umi",
]

MIDDLEWARE = [
    "django.middleware.security.SecurityMiddleware",
    "django.contrib.sessions.middleware.SessionMiddleware",
    "django.middleware.common.CommonMiddleware",
    "django.middleware.csrf.CsrfViewMiddleware",
    "django.contrib.auth.middleware.AuthenticationMiddleware",
    "django.contrib.messages.middleware.MessageMiddleware",
    "django.middleware.clickjacking.XFrameOptionsMiddleware",
]

ROOT_URLCONF = "umi.urls"

TEMPLATES = [
    {
        "BACKEND": "django.template.backends.django.DjangoTemplates",
        "DIRS": [],
        "APP_DIRS": True,
        "OPTIONS": {
            "context_processors": [
                "django.template.context_processors.request",
                "django.contrib.auth.context_processors.auth",
                "django.contrib.messages.context_processors.messages",
            ],
        },
    },
]

WSGI_APPLICATION = "umi.wsgi.application"


# Database
# Run bookkeeping only; sqlite is enough for a workstation.

DATABASES = {
    "default": env.db(
        default=f"sqlite:///{(BASE_DIR / 'db.sqlite3')}",
    ),
}

DEFAULT_AUTO_FIELD = "django.db.models.BigAutoField"


# Internationalization

LANGUAGE_CODE = "en-us"

TIME_ZONE = "UTC"

USE_I18N = True

USE_TZ = True


STATIC_URL = "static/"
STATIC_ROOT = BASE_DIR / "staticfiles"


# --- Logging ---
UMI_LOG_LEVEL = env("UMI_LOG_LEVEL", default="INFO")

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "colored": {
            "()": "coloredlogs.ColoredFormatter",
            "fmt": "%(asctime)s %(name)s %(levelname)s %(message)s",
        },
    },
    "handlers": {
        "console": {
            "class": "logging.StreamHandler",
            "formatter": "colored",
        },
    },
    "root": {"handlers": ["console"], "level": "WARNING"},
    "loggers": {
        "umi": {"level": UMI_LOG_LEVEL},
    },
}

# Celery Configuration
CELERY_BROKER_URL = env("CELERY_BROKER_URL", default="redis://127.0.0.1:6379/0")
CELERY_RESULT_BACKEND = env("CELERY_RESULT_BACKEND", default=CELERY_BROKER_URL)
CELERY_TIMEZONE = "UTC"
CELERY_ENABLE_UTC = True

# --- Pipeline ---
UMI_OUTPUT_DIR = env("UMI_OUTPUT_DIR", default=str(BASE_DIR / "runs"))
UMI_DEFAULT_SEED = env.int("UMI_DEFAULT_SEED", default=20240101)
UMI_THREADS = env.int("UMI_THREADS", default=0)
UMI_RECORD_RUNS = env.bool("UMI_RECORD_RUNS", default=True)

# --- Beamforming ---
UMI_VOXEL_PITCH_MM = env.float("UMI_VOXEL_PITCH_MM", default=0.5)
UMI_MAX_OFFSET_MM = env.float("UMI_MAX_OFFSET_MM", default=10.0)

# --- Aberration correction ---
UMI_IPR_TOLERANCE = env.float("UMI_IPR_TOLERANCE", default=1e-8)
UMI_IPR_MAX_ITERATIONS = env.int("UMI_IPR_MAX_ITERATIONS", default=200)
UMI_EPSILON_STOP = env.float("UMI_EPSILON_STOP", default=0.2)
UMI_FILTER_WIDTH_FACTOR = env.float("UMI_FILTER_WIDTH_FACTOR", default=3.0)

# --- RPSF analytics ---
# Background annulus bounds, in units of δρ₀(z).
UMI_ANNULUS_INNER_FACTOR = env.float("UMI_ANNULUS_INNER_FACTOR", default=6.0)
UMI_ANNULUS_OUTER_FACTOR = env.float("UMI_ANNULUS_OUTER_FACTOR", default=10.0)
UMI_CALIBRATED_RATES = env.bool("UMI_CALIBRATED_RATES", default=True)
