"""
Séries stroboscopiques ⟨ρ²⟩ et estimateurs de taux de diffusion.

Convention : mean_rho_sq[n] est mesuré à t' = n, juste avant le pulse n.
Toutes les erreurs statistiques viennent de la dispersion des moyennes de groupes.
"""
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from master.exceptions import InvalidParameterError
from params.types import DimensionlessParams


@dataclass(frozen=True)
class MomentumHistogram:
    """Distribution finale moyennée, par intervalles de largeur kbar centrés sur j·kbar"""
    bin_index: np.ndarray
    probabilities: np.ndarray
    kbar: float

    @property
    def momenta(self):
        return self.bin_index * self.kbar


@dataclass(frozen=True)
class KickSeries:
    mean_rho_sq: np.ndarray
    group_means: np.ndarray
    n_trajectories: int
    params: Optional[DimensionlessParams] = None
    # Sauts (ou reculs classiques) moyens par kick, une ligne par groupe
    jump_group_means: Optional[np.ndarray] = None
    final_distribution: Optional[MomentumHistogram] = field(default=None, compare=False)

    def __post_init__(self):
        if self.mean_rho_sq.ndim != 1 or self.mean_rho_sq.size < 1:
            raise InvalidParameterError("mean_rho_sq doit être un vecteur non vide", 'mean_rho_sq')
        if self.group_means.ndim != 2 or self.group_means.shape[1] != self.mean_rho_sq.size:
            raise InvalidParameterError(
                f"group_means de forme {self.group_means.shape} incompatible avec "
                f"{self.mean_rho_sq.size} instants", 'group_means'
            )
        if np.any(self.mean_rho_sq < 0):
            raise InvalidParameterError("⟨ρ²⟩ négatif", 'mean_rho_sq')

    @classmethod
    def from_values(cls, values, params=None):
        """Série sans groupes (erreur statistique nulle)"""
        values = np.asarray(values, dtype=float)
        return cls(values, values[np.newaxis, :].copy(), 1, params)

    @property
    def n_kicks(self):
        return self.mean_rho_sq.size - 1

    @property
    def n_groups(self):
        return self.group_means.shape[0]


@dataclass(frozen=True)
class DiffusionEstimate:
    value: float
    stderr: float
    kick_range: tuple

    def __post_init__(self):
        if not self.stderr >= 0:
            raise InvalidParameterError(f"stderr négative ({self.stderr})", 'stderr')
        first, last = self.kick_range
        if first > last:
            raise InvalidParameterError(f"fenêtre vide {self.kick_range}", 'kick_range')


def group_stderr(per_group):
    per_group = np.asarray(per_group, dtype=float)
    if per_group.size < 2:
        return 0.0
    return float(per_group.std(ddof=1) / math.sqrt(per_group.size))


def averaged_rate(series: KickSeries, first: int, last: int) -> DiffusionEstimate:
    """(⟨ρ²⟩[last+1] − ⟨ρ²⟩[first]) / (2·(last − first + 1))"""
    if not 0 <= first <= last:
        raise InvalidParameterError(f"fenêtre invalide ({first}, {last})", 'kick_range')
    if last + 1 > series.n_kicks:
        raise InvalidParameterError(
            f"kick {last + 1} hors de la série (0..{series.n_kicks})", 'kick_range'
        )
    width = 2.0 * (last - first + 1)
    value = (series.mean_rho_sq[last + 1] - series.mean_rho_sq[first]) / width
    per_group = (series.group_means[:, last + 1] - series.group_means[:, first]) / width
    return DiffusionEstimate(float(value), group_stderr(per_group), (first, last))


def diffusion_rate(series: KickSeries, n: int) -> DiffusionEstimate:
    """D(n) = (⟨ρ²⟩[n+1] − ⟨ρ²⟩[n]) / 2"""
    return averaged_rate(series, n, n)


def rate_series(series: KickSeries) -> np.ndarray:
    """Tous les D(n), n = 0..N-1"""
    return 0.5 * np.diff(series.mean_rho_sq)


def jump_rate(series: KickSeries, first=0, last=None):
    """Nombre moyen de sauts par kick sur [first, last] et son erreur de groupe"""
    if series.jump_group_means is None:
        raise InvalidParameterError("la série ne contient pas de comptage de sauts", 'jumps')
    last = series.n_kicks - 1 if last is None else last
    if not 0 <= first <= last < series.n_kicks:
        raise InvalidParameterError(f"fenêtre invalide ({first}, {last})", 'kick_range')
    per_group = series.jump_group_means[:, first:last + 1].mean(axis=1)
    return float(per_group.mean()), group_stderr(per_group)


class RateKind:
    INITIAL = 'initial_window'
    LATE = 'late_window'
    PER_KICK = 'per_kick'

    CHOICES = (INITIAL, LATE, PER_KICK)


@dataclass(frozen=True)
class CurvePoint:
    kbar: float
    rate_kind: str
    estimate: DiffusionEstimate
    classical_reference: Optional[float] = None


@dataclass(frozen=True)
class DiffusionCurve:
    points: tuple = ()
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        # kbar strictement croissant pour chaque fenêtre (per_kick : pour chaque kick)
        last_seen = {}
        for point in self.points:
            key = (point.rate_kind, point.estimate.kick_range if point.rate_kind == RateKind.PER_KICK else None)
            previous = last_seen.get(key)
            if previous is not None and not point.kbar > previous:
                raise InvalidParameterError(
                    f"kbar non strictement croissant ({previous} puis {point.kbar}) pour {point.rate_kind}",
                    'kbar'
                )
            last_seen[key] = point.kbar

    def __len__(self):
        return len(self.points)

    def kbar_values(self, rate_kind=None):
        return [p.kbar for p in self.points if rate_kind is None or p.rate_kind == rate_kind]

    def values(self, rate_kind):
        return np.array([p.estimate.value for p in self.points if p.rate_kind == rate_kind])

    def stderrs(self, rate_kind):
        return np.array([p.estimate.stderr for p in self.points if p.rate_kind == rate_kind])
