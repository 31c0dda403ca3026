from pathlib import Path
import os
from dotenv import load_dotenv

load_dotenv()
BASE_DIR = Path(__file__).resolve().parent.parent

SECRET_KEY = os.getenv('DJANGO_KEY', 'django-insecure-magnitudes-local-only')

DEBUG = os.getenv('DEBUG', 'False').lower() in ('1', 'true', 'yes')

LOG_LEVEL = os.getenv('LOG_LEVEL', 'WARNING').upper()

INSTALLED_APPS = [
    'relatorio',
]

TEMPLATES = [
    {
        'BACKEND': 'django.template.backends.django.DjangoTemplates',
        'DIRS': [],
        'APP_DIRS': True,
        'OPTIONS': {},
    },
]

# Sem banco de dados: os comandos só leem CSV e escrevem relatórios.
DATABASES = {}

LANGUAGE_CODE = 'pt-br'

TIME_ZONE = 'America/Sao_Paulo'

USE_I18N = False

USE_TZ = True

# Logs vão para stderr; stdout fica reservado ao relatório.
LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'simple': {
            'format': '%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        },
    },
    'handlers': {
        'stderr': {
            'class': 'logging.StreamHandler',
            'stream': 'ext://sys.stderr',
            'formatter': 'simple',
        },
    },
    'loggers': {
        'estatistica': {'handlers': ['stderr'], 'level': LOG_LEVEL, 'propagate': False},
        'relatorio': {'handlers': ['stderr'], 'level': LOG_LEVEL, 'propagate': False},
    },
}
