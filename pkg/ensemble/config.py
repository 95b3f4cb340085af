"""
Configuration d'un ensemble de trajectoires.
"""
import dataclasses
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from classical.dynamics import DEFAULT_SUBSTEPS as DEFAULT_CLASSICAL_SUBSTEPS
from master.exceptions import InvalidParameterError
from params.types import DimensionlessParams
from quantum.propagator import DEFAULT_LEAK_TOLERANCE, default_substeps
from quantum.recoil import RecoilDistribution
from quantum.state import validate_grid_size
from .seeding import validate_seed


class SimulationMode(str, Enum):
    QUANTUM = 'quantum'
    CLASSICAL = 'classical'


@dataclass(frozen=True)
class EnsembleConfig:
    params: DimensionlessParams
    master_seed: int
    n_kicks: int = 61
    n_trajectories: int = 1000
    n_groups: int = 10
    grid_size: int = 4096
    # None : max(150, ceil(12κ))
    substeps: Optional[int] = None
    recoil: RecoilDistribution = RecoilDistribution.DIPOLE_PERPENDICULAR
    mode: SimulationMode = SimulationMode.QUANTUM
    leak_tolerance: float = DEFAULT_LEAK_TOLERANCE
    initial_window: tuple = (2, 5)
    late_window: tuple = (30, 60)
    classical_particles: int = 10000
    classical_substeps: int = DEFAULT_CLASSICAL_SUBSTEPS
    classical_noise: bool = True

    def __post_init__(self):
        object.__setattr__(self, 'recoil', RecoilDistribution(self.recoil))
        object.__setattr__(self, 'mode', SimulationMode(self.mode))
        validate_seed(self.master_seed)
        if self.n_kicks < 2:
            raise InvalidParameterError(f"au moins 2 kicks (reçu {self.n_kicks})", 'kicks')
        if self.n_groups < 1:
            raise InvalidParameterError("au moins un groupe", 'groups')
        if self.n_trajectories < 1 or self.n_trajectories % self.n_groups:
            raise InvalidParameterError(
                f"{self.n_trajectories} trajectoires ne se répartissent pas en {self.n_groups} groupes égaux",
                'trajectories'
            )
        validate_grid_size(self.grid_size)
        if self.substeps is not None and self.substeps < 1:
            raise InvalidParameterError("substeps doit être ≥ 1", 'substeps')
        if not 0.0 < self.leak_tolerance < 1.0:
            raise InvalidParameterError("leak_tolerance doit être dans ]0, 1[", 'leak_tolerance')
        for name in ('initial_window', 'late_window'):
            first, last = getattr(self, name)
            if not 0 <= first <= last:
                raise InvalidParameterError(f"fenêtre {first}:{last} invalide", name)
        if self.classical_particles < 10:
            raise InvalidParameterError("au moins 10 particules classiques", 'classical_particles')
        if self.classical_substeps < 1:
            raise InvalidParameterError("classical_substeps doit être ≥ 1", 'classical_substeps')

    @property
    def resolved_substeps(self):
        return self.substeps if self.substeps is not None else default_substeps(self.params.kappa)

    @property
    def group_size(self):
        return self.n_trajectories // self.n_groups

    def window(self, rate_kind):
        return {'initial_window': self.initial_window, 'late_window': self.late_window}[rate_kind]

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    def with_params(self, **changes):
        return self.replace(params=self.params.with_changes(**changes))
