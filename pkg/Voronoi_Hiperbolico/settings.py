"""
Django settings for Voronoi_Hiperbolico project.

O projeto não serve páginas: o Django hospeda o app de cálculo (APP),
o comando de gerenciamento `lab`, o registro de execuções e os serializers.

For the full list of settings and their values, see
https://docs.djangoproject.com/en/5.2/ref/settings/
"""

from pathlib import Path
import os

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent


# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = os.environ.get('DJANGO_SECRET_KEY', 'lab-voronoi-hiperbolico-chave-local-apenas-para-desenvolvimento')

DEBUG = os.environ.get('DJANGO_DEBUG', '0') == '1'

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    'django.contrib.contenttypes',
    # Apps de terceiros
    'rest_framework',
    # Nosso app principal
    'APP',
]

MIDDLEWARE = []

TEMPLATES = [
    {
        'BACKEND': 'django.template.backends.django.DjangoTemplates',
        'DIRS': [],
        'APP_DIRS': True,
        'OPTIONS': {
            'context_processors': [],
            # Relatórios são texto puro, não HTML
            'autoescape': False,
        },
    },
]


# Database
# https://docs.djangoproject.com/en/5.2/ref/settings/#databases

DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': BASE_DIR / 'db.sqlite3',
    }
}


# Internationalization

LANGUAGE_CODE = 'pt-br'

TIME_ZONE = 'America/Sao_Paulo'

USE_I18N = True

USE_TZ = True


# Default primary key field type

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'


# --- CONFIGURAÇÕES DA API REST ---
# Só usamos os serializers (validação de configuração e resumos JSON)
REST_FRAMEWORK = {
    'DEFAULT_RENDERER_CLASSES': [
        'rest_framework.renderers.JSONRenderer',
    ],
    'COERCE_DECIMAL_TO_STRING': False,
}


# --- CONFIGURAÇÕES DE LOG ---
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
        'APP': {
            'handlers': ['console'],
            'level': os.environ.get('LAB_LOG_LEVEL', 'INFO'),
            'propagate': False,
        },
        'django': {
            'handlers': ['console'],
            'level': 'WARNING',
        },
    },
}


# --- CONFIGURAÇÕES DO LABORATÓRIO ---
VORONOI_LAB = {
    'ARTIFACT_VERSION': '1.0',

    # Pasta padrão das saídas (CSV, JSON, SVG)
    'OUTPUT_DIR': os.environ.get('LAB_OUTPUT_DIR', str(BASE_DIR / 'saidas')),

    'WORKERS': int(os.environ.get('LAB_WORKERS', '1')),

    # Pacote de tolerâncias do hypmath (pode ser sobrescrito no YAML)
    'TOLERANCIAS': {
        'hiperboloide': 1e-9,
        'vertice': 1e-7,
        'bissetor': 1e-8,
        'degenerado': 1e-12,
        'coincidencia': 1e-10,
    },

    # Janelas do plano
    'RAIO_MAXIMO': 25.0,
    'MAX_PONTOS': 10_000_000,
    'PONTOS_INICIAIS': 1500,

    # Translados da superfície de Bolza
    'CORTE_TRANSLADOS': 10.0,
    'COMPRIMENTO_PALAVRA': 12,

    'REGISTRAR_EXECUCOES': True,

    # Valores padrão de cada subcomando
    'PADROES': {
        'typical-cell': {'lambdas': [0.5], 'replicas': 1000, 'seed': 42},
        'isokawa-ref': {'lambdas': [1.0], 'seed': 0},
        'density': {'lambdas': [1.0, 0.1, 0.01], 'replicas': 1000, 'seed': 42},
        'tessellate': {'lambdas': [1.0], 'radius': 6.0, 'seed': 7, 'subwindow': 3.0},
        'surface': {'lambdas': [2.0], 'draws': 100, 'seed': 42},
        'color': {'lambdas': [2.0], 'trials': 200, 'colorings': 0, 'seed': 42},
        'graph': {'n': 10000, 'd': 3, 's': 50, 'trials': 1000, 'seed': 42},
        'exact-cheeger': {'graph': 'petersen', 'seed': 42},
        'lemma': {'which': 'all', 'samples': 100000, 'seed': 42},
        'render': {'lambdas': [1.0], 'radius': 6.0, 'width': 800, 'height': 800, 'stroke': 1.0, 'seed': 7},
    },
}
