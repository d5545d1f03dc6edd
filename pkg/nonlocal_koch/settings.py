"""
Django settings for the nonlocal_koch project.

The project has no web surface and no database; Django provides the
settings layer, logging configuration, management commands and the test
runner.
"""

import os

from decouple import config

import nonlocal_koch

BASE_DIR = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))

SECRET_KEY = config('SECRET_KEY', default='nonlocal-koch-local-key')

DEBUG = config('DEBUG', default=True, cast=bool)

INSTALLED_APPS = [
    'rest_framework',

    'nonlocal_koch.apps.core',
    'nonlocal_koch.apps.symbols',
    'nonlocal_koch.apps.subordinate',
    'nonlocal_koch.apps.nonlocal_ops',
    'nonlocal_koch.apps.koch',
    'nonlocal_koch.apps.walker',
    'nonlocal_koch.apps.spectral',
    'nonlocal_koch.apps.cli',
]

DATABASES = {}

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = False

USE_TZ = True

REST_FRAMEWORK = {
    'NON_FIELD_ERRORS_KEY': 'error',
}

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{asctime} {levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'verbose',
        },
    },
    'loggers': {
        'nonlocal_koch': {
            'handlers': ['console'],
            'level': config('NONLOCAL_KOCH_LOG_LEVEL', default='INFO'),
            'propagate': False,
        },
    },
}

"""numerical configuration"""

NONLOCAL_KOCH_VERSION = nonlocal_koch.__version__

"""
    worker threads for Monte Carlo runs; `--threads` overrides it
"""
NONLOCAL_KOCH_THREADS = config('NONLOCAL_KOCH_THREADS', default=1, cast=int)

"""
    paths per seeded stream; fixed so results do not depend on threads
"""
NONLOCAL_KOCH_CHUNK_SIZE = config(
    'NONLOCAL_KOCH_CHUNK_SIZE', default=512, cast=int)

NONLOCAL_KOCH_CENSOR_STEPS = 10 ** 6

NONLOCAL_KOCH_TALBOT_NODES = 32

NONLOCAL_KOCH_STEHFEST_NODES = 16

NONLOCAL_KOCH_ML_SWITCH_RADIUS = 5.0

NONLOCAL_KOCH_QUAD_EPSABS = 1e-10

NONLOCAL_KOCH_SPECTRAL_MODES = 64

NONLOCAL_KOCH_SPECTRAL_MODES_2D = 32

NONLOCAL_KOCH_SLOW_TESTS = config(
    'NONLOCAL_KOCH_SLOW_TESTS', default=False, cast=bool)
