"""
Django settings for the qkdlab project.

For more information on this file, see
https://docs.djangoproject.com/en/4.2/topics/settings/

For the full list of settings and their values, see
https://docs.djangoproject.com/en/4.2/ref/settings/
"""
import os
from pathlib import Path

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# The toolkit never serves requests; the key only satisfies Django's checks.
SECRET_KEY = os.environ.get(
    'QKDLAB_SECRET_KEY',
    'django-insecure-qkdlab-local-toolkit-key',
)

DEBUG = bool(int(os.environ.get('QKDLAB_DEBUG', 0)))

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    'django.contrib.auth',
    'django.contrib.contenttypes',
    'rest_framework',
    'core',
    'fockspace',
    'receivers',
    'attacks',
    'protocol',
    'fuzz',
    'classify',
]

MIDDLEWARE = []


# Database
# https://docs.djangoproject.com/en/4.2/ref/settings/#databases

DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': os.environ.get('QKDLAB_DB_PATH', str(BASE_DIR / 'db.sqlite3')),
    }
}


# Internationalization
# https://docs.djangoproject.com/en/4.2/topics/i18n/

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = False

USE_TZ = True

# Default primary key field type
# https://docs.djangoproject.com/en/4.2/ref/settings/#default-auto-field

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'


# Toolkit settings

QKDLAB = {
    'PHOTON_CUTOFF': int(os.environ.get('QKDLAB_PHOTON_CUTOFF', 10)),
    'DEFAULT_SEED': 0,
    'RECORD_RUNS': bool(int(os.environ.get('QKDLAB_RECORD_RUNS', 1))),
    'ARTIFACT_SCHEMA_VERSION': '1',
    'SIMULATION_CHUNK': 65536,
    'FUZZ_REPEATS': 20,
    'FUZZ_FRAME_SLOTS': 16,
}


# Logging

LOG_LEVELS = {
    'error': 'ERROR',
    'warn': 'WARNING',
    'info': 'INFO',
    'debug': 'DEBUG',
}

LOG_LEVEL = LOG_LEVELS.get(
    os.environ.get('QKDLAB_LOG_LEVEL', 'warn').lower(),
    'WARNING',
)

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '%(asctime)s %(levelname)s %(name)s: %(message)s',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'verbose',
        },
    },
    'loggers': {
        app: {
            'handlers': ['console'],
            'level': LOG_LEVEL,
            'propagate': False,
        }
        for app in (
            'core',
            'fockspace',
            'receivers',
            'attacks',
            'protocol',
            'fuzz',
            'classify',
        )
    },
}
