"""
Journalisation des temps de calcul sur le logger 'performance'.

Le niveau monte avec la durée : au-delà de 60 s un avertissement, au-delà de
10 minutes une erreur.
"""
import logging
import time
from contextlib import contextmanager

logger = logging.getLogger('performance')

SLOW_RUN_SECONDS = 60.0
VERY_SLOW_RUN_SECONDS = 600.0


def log_timing(label, duration, work_units=None, unit_name='unités'):
    if duration > VERY_SLOW_RUN_SECONDS:
        log, marker = logger.error, '🔴'
    elif duration > SLOW_RUN_SECONDS:
        log, marker = logger.warning, '🟡'
    else:
        log, marker = logger.info, '🟢'

    message = f"{marker} [PERF] {label} | Temps total: {duration:.2f}s"
    if work_units:
        message += f" | {work_units} {unit_name} ({duration / work_units * 1000:.2f}ms par unité)"
    log(message)


@contextmanager
def timed(label, work_units=None, unit_name='unités'):
    """Mesure le bloc et journalise sa durée, y compris en cas d'exception"""
    start = time.time()
    try:
        yield
    finally:
        log_timing(label, time.time() - start, work_units, unit_name)
