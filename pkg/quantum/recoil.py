"""
Distribution N(u) du recul projeté sur l'axe de l'onde stationnaire.

Échantillonnage par inversion exacte de la fonction de répartition.
"""
from enum import Enum

import numpy as np


class RecoilDistribution(str, Enum):
    DIPOLE_PERPENDICULAR = 'dipole_perpendicular'   # 3/8 (1 + u²)
    DIPOLE_PARALLEL = 'dipole_parallel'             # 3/4 (1 - u²)
    UNIFORM = 'uniform'                             # 1/2

    def density(self, u):
        u = np.asarray(u, dtype=float)
        inside = np.abs(u) <= 1.0
        if self is RecoilDistribution.DIPOLE_PERPENDICULAR:
            values = 0.375 * (1.0 + u ** 2)
        elif self is RecoilDistribution.DIPOLE_PARALLEL:
            values = 0.75 * (1.0 - u ** 2)
        else:
            values = np.full_like(u, 0.5)
        return np.where(inside, values, 0.0)

    @property
    def variance(self):
        return {
            RecoilDistribution.DIPOLE_PERPENDICULAR: 2.0 / 5.0,
            RecoilDistribution.DIPOLE_PARALLEL: 1.0 / 5.0,
            RecoilDistribution.UNIFORM: 1.0 / 3.0,
        }[self]

    def inverse_cdf(self, r):
        r = np.asarray(r, dtype=float)
        if self is RecoilDistribution.DIPOLE_PERPENDICULAR:
            # u³ + 3u - c = 0, c = 8r - 4 : une seule racine réelle (Cardan)
            c = 8.0 * r - 4.0
            root = np.sqrt(0.25 * c ** 2 + 1.0)
            u = np.cbrt(0.5 * c + root) + np.cbrt(0.5 * c - root)
        elif self is RecoilDistribution.DIPOLE_PARALLEL:
            # u = 2 cos θ avec cos 3θ = 1 - 2r, branche croissante de -1 à 1
            theta = (np.arccos(np.clip(1.0 - 2.0 * r, -1.0, 1.0)) + 4.0 * np.pi) / 3.0
            u = 2.0 * np.cos(theta)
        else:
            u = 2.0 * r - 1.0
        return np.clip(u, -1.0, 1.0)


def sample_recoil(d: RecoilDistribution, rng: np.random.Generator, size=None):
    """Tire u ∈ [-1, 1] selon N(u) ; un float si size est None"""
    u = d.inverse_cdf(rng.random(size))
    return float(u) if size is None else u
