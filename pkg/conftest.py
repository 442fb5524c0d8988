# Wiring para rodar a suíte Django (APP/tests) sob pytest, equivalente a
# `python manage.py test`: configura settings e cria o banco de teste.
import os

import django
import pytest

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'Voronoi_Hiperbolico.settings')
django.setup()


@pytest.fixture(scope='session', autouse=True)
def _django_test_environment():
    from django.test.utils import (setup_databases, setup_test_environment,
                                   teardown_databases, teardown_test_environment)
    setup_test_environment()
    old_config = setup_databases(verbosity=0, interactive=False)
    yield
    teardown_databases(old_config, verbosity=0)
    teardown_test_environment()
