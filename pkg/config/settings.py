"""
Django settings for the netcap Modular Monolith.

This configuration follows the Modular Monolith architecture pattern,
organizing the capacity toolkit into independent modules with clear boundaries.
There is no database and no HTTP surface: the project is driven through the
``netcap`` management command.
"""

import os
from pathlib import Path

from decouple import config

# Build paths inside the project
BASE_DIR = Path(__file__).resolve().parent.parent

# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = config(
    'DJANGO_SECRET_KEY',
    default='django-insecure-netcap-local-only',
)

DEBUG = config('DEBUG', default=False, cast=bool)

ALLOWED_HOSTS = []

# Application definition
# Organized by: Third-party -> Business Modules
INSTALLED_APPS = [
    # Third-party apps
    'rest_framework',

    # Business modules (Modular Monolith)
    'modules.networks',
    'modules.coding',
    'modules.modeling',
    'modules.search',
    'modules.cli',
]

# No persistent state: every run is a pure function of its input files.
DATABASES = {}

# Internationalization
LANGUAGE_CODE = 'en-us'
TIME_ZONE = 'UTC'
USE_I18N = False
USE_TZ = True

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

# REST Framework Configuration (serializers only)
REST_FRAMEWORK = {
    'UNAUTHENTICATED_USER': None,
}

# Logging Configuration
LOG_DIR = Path(config('NETCAP_LOG_DIR', default=str(BASE_DIR / 'logs')))

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{levelname} {asctime} {module} {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'verbose',
            'level': config('NETCAP_LOG_LEVEL', default='WARNING'),
        },
        'file': {
            'class': 'logging.FileHandler',
            'filename': LOG_DIR / 'netcap.log',
            'formatter': 'verbose',
            'level': 'DEBUG',
            'delay': True,
        },
    },
    'root': {
        'handlers': ['console'],
        'level': 'WARNING',
    },
    'loggers': {
        'django': {
            'handlers': ['console'],
            'level': 'WARNING',
            'propagate': False,
        },
        'modules': {
            'handlers': ['console', 'file'],
            'level': 'DEBUG',
            'propagate': False,
        },
        'shared': {
            'handlers': ['console', 'file'],
            'level': 'DEBUG',
            'propagate': False,
        },
    },
}

# Create logs directory if it doesn't exist
os.makedirs(LOG_DIR, exist_ok=True)

# Module-specific settings
# Each module can have its own configuration namespace

# Network Core Settings
NETWORKS_CONFIG = {
    'DATA_DIR': Path(config('NETCAP_DATA_DIR', default=str(BASE_DIR / 'data'))),
}

# Coding Core Settings
# Monic moduli, coefficients lowest degree first.
CODING_CONFIG = {
    'FIELD_MODULI': {
        4: (1, 1, 1),     # a^2 + a + 1
        8: (1, 1, 0, 1),  # a^3 + a + 1
        9: (1, 0, 1),     # a^2 + 1
    },
}

# MIP Model Settings
MODELING_CONFIG = {
    'MAX_TABLE_VARIABLES': config('NETCAP_MAX_TABLE_VARIABLES', default=10 ** 6, cast=int),
    'EXPORT_DIR': Path(config('NETCAP_EXPORT_DIR', default='.')),
}

# Search Engine Settings
SEARCH_CONFIG = {
    'ORACLE_MAX_CHECKS': 10 ** 8,
    'NODE_CHECK_INTERVAL': 4096,
    'ATTEMPT_SHARE': 0.5,
    'DEFAULT_TIME_LIMIT': None,
    'DEFAULT_WORKERS': config('NETCAP_WORKERS', default=1, cast=int),
}
