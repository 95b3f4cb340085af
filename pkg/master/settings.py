from pathlib import Path
from decouple import config

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent


# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = config('SECRET_KEY', default='django-insecure-rotor-3v!q8k2m#x1w7p0z$e5r9t4y6u')

# SECURITY WARNING: don't run with debug turned on in production!
DEBUG = config('DEBUG', default=False, cast=bool)


# Application definition

INSTALLED_APPS = [
    'django.contrib.admin',
    'django.contrib.auth',
    'django.contrib.contenttypes',
    'django.contrib.sessions',
    'django.contrib.messages',
    'django.contrib.staticfiles',
    'rest_framework',
    'params',
    'quantum',
    'classical',
    'analytics',
    'ensemble',
    'experiments',
]

MIDDLEWARE = [
    'django.middleware.security.SecurityMiddleware',
    'django.contrib.sessions.middleware.SessionMiddleware',
    'django.middleware.common.CommonMiddleware',
    'django.middleware.csrf.CsrfViewMiddleware',
    'django.contrib.auth.middleware.AuthenticationMiddleware',
    'django.contrib.messages.middleware.MessageMiddleware',
    'django.middleware.clickjacking.XFrameOptionsMiddleware',
]

ROOT_URLCONF = 'master.urls'

TEMPLATES = [
    {
        'BACKEND': 'django.template.backends.django.DjangoTemplates',
        'DIRS': [],
        'APP_DIRS': True,
        'OPTIONS': {
            'context_processors': [
                'django.template.context_processors.request',
                'django.contrib.auth.context_processors.auth',
                'django.contrib.messages.context_processors.messages',
            ],
        },
    },
]


# Database
# Le registre des exécutions (experiments.SimulationRun) tient dans un fichier SQLite local
DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': config('SQLITE_PATH', default=str(BASE_DIR / 'db.sqlite3')),
    }
}


# Internationalization
# https://docs.djangoproject.com/en/5.2/topics/i18n/

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = True

USE_TZ = True


STATIC_URL = 'static/'

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

# ============================================================================
# Configuration du simulateur
# ============================================================================
# Valeurs par défaut appliquées par experiments.config_parser.
# Les modules de dynamique ne lisent jamais les settings : ils reçoivent tout en argument.
ROTOR_CONFIG = {
    'ALPHA': 0.005,                 # fraction de pulse utilisée dans toutes les figures
    'ETA': 0.0,
    'SIGMA_RHO_OVER_KBAR': 4.0,     # largeur initiale σ_ρ/kbar
    'KICKS': 61,                    # D(60) demande ⟨ρ²⟩ au kick 61 (fenêtre tardive 30–60)
    'TRAJECTORIES': 1000,
    'GROUPS': 10,
    'GRID': 4096,
    'LEAK_TOLERANCE': 1e-8,
    'RECOIL': 'dipole_perpendicular',
    'INITIAL_WINDOW': (2, 5),
    'LATE_WINDOW': (30, 60),
    'CLASSICAL_PARTICLES': 10000,
    'CLASSICAL_SUBSTEPS': 64,
    'CLASSICAL_NOISE': True,
}

ROTOR_WORKERS = config('ROTOR_WORKERS', default=1, cast=int)
ROTOR_PROGRESS = config('ROTOR_PROGRESS', default=True, cast=bool)
ROTOR_LOG_LEVEL = config('ROTOR_LOG_LEVEL', default='INFO')

# ============================================================================
# Configuration Logging
# ============================================================================
LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{levelname} {asctime} {module} {process:d} {message}',
            'style': '{',
        },
        'simple': {
            'format': '{levelname} {asctime} {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'level': 'DEBUG',
            'class': 'logging.StreamHandler',
            'formatter': 'verbose',
        },
        'perf_console': {
            'level': 'DEBUG',
            'class': 'logging.StreamHandler',
            'formatter': 'simple',
        },
    },
    'loggers': {
        'django': {
            'handlers': ['console'],
            'level': 'INFO',
            'propagate': False,
        },
        'params': {
            'handlers': ['console'],
            'level': ROTOR_LOG_LEVEL,
            'propagate': False,
        },
        'quantum': {
            'handlers': ['console'],
            'level': ROTOR_LOG_LEVEL,
            'propagate': False,
        },
        'classical': {
            'handlers': ['console'],
            'level': ROTOR_LOG_LEVEL,
            'propagate': False,
        },
        'analytics': {
            'handlers': ['console'],
            'level': ROTOR_LOG_LEVEL,
            'propagate': False,
        },
        'ensemble': {
            'handlers': ['console'],
            'level': ROTOR_LOG_LEVEL,
            'propagate': False,
        },
        'experiments': {
            'handlers': ['console'],
            'level': ROTOR_LOG_LEVEL,
            'propagate': False,
        },
        'performance': {
            'handlers': ['perf_console'],
            'level': 'INFO',
            'propagate': False,
        },
    },
}

# Activer le détail des pas d'intégration en développement
if DEBUG:
    LOGGING['loggers']['quantum']['level'] = 'DEBUG'
