"""
Flux aléatoires dérivés de la graine maîtresse.

Le flux d'indice i ne dépend que de (graine, famille, i) : l'ordre d'exécution
et le nombre de workers n'ont aucune influence sur les tirages.
"""
import numpy as np

from master.exceptions import InvalidParameterError

QUANTUM_STREAM = 0
CLASSICAL_STREAM = 1

MAX_SEED = 2 ** 64 - 1


def validate_seed(seed):
    if not isinstance(seed, (int, np.integer)) or isinstance(seed, bool) or not 0 <= seed <= MAX_SEED:
        raise InvalidParameterError(f"graine hors de [0, 2^64) (reçu {seed!r})", 'seed')
    return int(seed)


def stream_rng(master_seed, family, index) -> np.random.Generator:
    sequence = np.random.SeedSequence(validate_seed(master_seed), spawn_key=(family, index))
    return np.random.default_rng(sequence)


def trajectory_rng(master_seed, trajectory) -> np.random.Generator:
    return stream_rng(master_seed, QUANTUM_STREAM, trajectory)
