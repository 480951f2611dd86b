"""
Django settings for funcscan_platform.

Covers:
- SQLite by default, PostgreSQL when DB_ENGINE/DB_* are set
- numerical defaults for the association toolkit (FUNCSCAN_*)
- REST API (DRF + simplejwt + drf-spectacular)
- Celery for background scans
- console logging, plain or JSON, and opt-in Sentry
"""

from datetime import timedelta
from pathlib import Path

from decouple import config

BASE_DIR = Path(__file__).resolve().parent.parent

_DEBUG_ENV = config('DEBUG', default='False')
DEBUG = str(_DEBUG_ENV).lower() in ('true', '1', 'yes', 'on')

# The CLI runs without any web exposure, so a local key is acceptable there;
# deployments of the API must provide SECRET_KEY.
SECRET_KEY = config('SECRET_KEY', default='funcscan-local-cli-key')

ALLOWED_HOSTS = config('ALLOWED_HOSTS', default='localhost,127.0.0.1,testserver',
                       cast=lambda v: [s.strip() for s in v.split(',')])


INSTALLED_APPS = [
    "django.contrib.admin",
    "django.contrib.auth",
    "django.contrib.contenttypes",
    "django.contrib.sessions",
    "django.contrib.messages",
    "django.contrib.staticfiles",

    # Third-party apps
    "rest_framework",
    "rest_framework_simplejwt",
    "drf_spectacular",

    # Local apps
    "fnspace",    # Grids, curves, kernels, spectra
    "smoothing",  # Penalized B-spline reconstruction + kriging
    "qform",      # Weighted chi-square tail probabilities
    "flm",        # Functional linear model fits
    "assoc",      # Association tests
    "simgen",     # Simulation engine and power study
    "scan",       # Genome scan orchestration, stored runs
    "api",        # REST API
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

ROOT_URLCONF = "funcscan_platform.urls"

TEMPLATES = [
    {
        "BACKEND": "django.template.backends.django.DjangoTemplates",
        "DIRS": [],
        "APP_DIRS": True,
        "OPTIONS": {
            "context_processors": [
                "django.template.context_processors.debug",
                "django.template.context_processors.request",
                "django.contrib.auth.context_processors.auth",
                "django.contrib.messages.context_processors.messages",
            ],
        },
    },
]

WSGI_APPLICATION = "funcscan_platform.wsgi.application"


# Database
DB_ENGINE = config('DB_ENGINE', default='django.db.backends.sqlite3')
if DB_ENGINE.endswith('sqlite3'):
    DATABASES = {
        "default": {
            "ENGINE": DB_ENGINE,
            "NAME": config('DB_NAME', default=str(BASE_DIR / 'funcscan.sqlite3')),
        }
    }
else:
    DATABASES = {
        "default": {
            "ENGINE": DB_ENGINE,
            "NAME": config('DB_NAME', default='funcscan'),
            "USER": config('DB_USER', default='postgres'),
            "PASSWORD": config('DB_PASSWORD', default=''),
            "HOST": config('DB_HOST', default='localhost'),
            "PORT": config('DB_PORT', default='5432'),
        }
    }

DEFAULT_AUTO_FIELD = "django.db.models.BigAutoField"

AUTH_PASSWORD_VALIDATORS = [
    {"NAME": "django.contrib.auth.password_validation.MinimumLengthValidator"},
    {"NAME": "django.contrib.auth.password_validation.CommonPasswordValidator"},
]

LANGUAGE_CODE = "en-us"
TIME_ZONE = "UTC"
USE_I18N = False
USE_TZ = True

STATIC_URL = "static/"
STATIC_ROOT = BASE_DIR / "staticfiles"


# Association toolkit defaults
FUNCSCAN_IMHOF_MAX_TERMS = config('FUNCSCAN_IMHOF_MAX_TERMS', default=100, cast=int)
FUNCSCAN_IMHOF_TRACE_FRACTION = config('FUNCSCAN_IMHOF_TRACE_FRACTION', default=0.9999, cast=float)
FUNCSCAN_IMHOF_ABS_TOL = config('FUNCSCAN_IMHOF_ABS_TOL', default=1e-12, cast=float)
FUNCSCAN_IMHOF_REL_TOL = config('FUNCSCAN_IMHOF_REL_TOL', default=1e-3, cast=float)
FUNCSCAN_SCAN_CHUNK_SIZE = config('FUNCSCAN_SCAN_CHUNK_SIZE', default=256, cast=int)
FUNCSCAN_SCAN_THREADS = config('FUNCSCAN_SCAN_THREADS', default=1, cast=int)
FUNCSCAN_OUTPUT_DIR = Path(config('FUNCSCAN_OUTPUT_DIR', default=str(BASE_DIR / 'output')))


# Django REST Framework
REST_FRAMEWORK = {
    'DEFAULT_SCHEMA_CLASS': 'drf_spectacular.openapi.AutoSchema',
    'DEFAULT_PAGINATION_CLASS': 'rest_framework.pagination.PageNumberPagination',
    'PAGE_SIZE': 50,
    'DEFAULT_AUTHENTICATION_CLASSES': [
        'rest_framework.authentication.SessionAuthentication',
        'rest_framework_simplejwt.authentication.JWTAuthentication',
    ],
}

SIMPLE_JWT = {
    'ACCESS_TOKEN_LIFETIME': timedelta(minutes=60),
    'REFRESH_TOKEN_LIFETIME': timedelta(days=7),
}

SPECTACULAR_SETTINGS = {
    'TITLE': 'funcscan API',
    'DESCRIPTION': 'Stored functional genome scans and weighted chi-square p-values.',
    'VERSION': '1.0.0',
}


# Celery
CELERY_BROKER_URL = config('CELERY_BROKER_URL', default='redis://localhost:6379/0')
CELERY_RESULT_BACKEND = config('CELERY_RESULT_BACKEND', default='redis://localhost:6379/0')
CELERY_ACCEPT_CONTENT = ['json']
CELERY_TASK_SERIALIZER = 'json'
CELERY_RESULT_SERIALIZER = 'json'
CELERY_TIMEZONE = TIME_ZONE
CELERY_TASK_ALWAYS_EAGER = config('CELERY_TASK_ALWAYS_EAGER', default=False, cast=bool)


# Logging
#
# LOG_JSON switches the console handler to one JSON document per line;
# per-SNP fields passed via extra= are kept as structured keys.
LOG_JSON = config('LOG_JSON', default=False, cast=bool)
_LOG_FORMATTER = 'json' if LOG_JSON else 'verbose'
_APP_LOG_LEVEL = 'DEBUG' if DEBUG else 'INFO'

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{levelname} {asctime} {name} {message}',
            'style': '{',
        },
        'json': {
            '()': 'funcscan_platform.logging_config.JSONFormatter',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': _LOG_FORMATTER,
        },
    },
    'root': {
        'handlers': ['console'],
        'level': 'WARNING',
    },
    'loggers': {
        'django': {
            'handlers': ['console'],
            'level': 'INFO',
            'propagate': False,
        },
        **{
            app: {'handlers': ['console'], 'level': _APP_LOG_LEVEL, 'propagate': False}
            for app in ('fnspace', 'smoothing', 'qform', 'flm', 'assoc', 'simgen', 'scan',
                        'api', 'funcscan_platform')
        },
    },
}


# Sentry, opt-in via SENTRY_DSN.
SENTRY_DSN = config('SENTRY_DSN', default='')
if SENTRY_DSN:
    from .logging_config import init_sentry
    init_sentry(
        dsn=SENTRY_DSN,
        environment=config('SENTRY_ENVIRONMENT', default='development' if DEBUG else 'production'),
        release=config('SENTRY_RELEASE', default=None),
        traces_sample_rate=config('SENTRY_TRACES_SAMPLE_RATE', default=0.0, cast=float),
    )
