"""
Pool de processos para réplicas independentes.
Os resultados voltam sempre na ordem das tarefas: o número de workers
muda só o tempo de execução.
"""
import logging
import os
from concurrent.futures import ProcessPoolExecutor

import django
from django.conf import settings

from . import hypmath

logger = logging.getLogger(__name__)


def _inicializar_worker(tolerancias):
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'Voronoi_Hiperbolico.settings')
    django.setup()
    if tolerancias:
        hypmath.configure_tolerances(**tolerancias)


def default_workers():
    return max(1, int(settings.VORONOI_LAB.get('WORKERS', 1)))


def map_replicas(func, tasks, workers=None, chunksize=None):
    """Aplica func a cada tarefa; func precisa ser função de módulo (picklable)"""
    tasks = list(tasks)
    workers = default_workers() if workers is None else int(workers)
    if workers <= 1 or len(tasks) <= 1:
        return [func(t) for t in tasks]
    chunksize = chunksize or max(1, len(tasks) // (workers * 4))
    logger.debug('%d tarefas em %d workers (chunksize %d)', len(tasks), workers, chunksize)
    with ProcessPoolExecutor(max_workers=workers, initializer=_inicializar_worker,
                             initargs=(hypmath.tolerance_overrides(),)) as pool:
        return list(pool.map(func, tasks, chunksize=chunksize))
