"""
État d'une trajectoire quantique sur une échelle d'impulsions décalée.

La composante d'indice m porte l'impulsion ρ_m = (m + β)·kbar, avec
m ∈ [-N/2, N/2) et β ∈ [0, 1) la quasi-impulsion. Les amplitudes sont
stockées dans l'ordre centré : l'indice de tableau i correspond à m = i - N/2.
"""
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from master.exceptions import InvalidParameterError

MIN_GRID_SIZE = 32


def validate_grid_size(grid_size):
    if grid_size < MIN_GRID_SIZE or grid_size & (grid_size - 1):
        raise InvalidParameterError(
            f"grid_size doit être une puissance de deux ≥ {MIN_GRID_SIZE} (reçu {grid_size})", 'grid'
        )


@dataclass
class QuantumState:
    amplitudes: np.ndarray
    beta: float
    norm_sq: float = 1.0
    # Seuil en attente pour la méthode du seuil de norme (None tant qu'il n'est pas tiré)
    threshold: Optional[float] = field(default=None)

    @property
    def grid_size(self):
        return self.amplitudes.size

    @property
    def ladder(self):
        half = self.grid_size // 2
        return np.arange(-half, half)

    def momenta(self, kbar):
        return (self.ladder + self.beta) * kbar

    def probabilities(self):
        return np.abs(self.amplitudes) ** 2

    def copy(self):
        return QuantumState(self.amplitudes.copy(), self.beta, self.norm_sq, self.threshold)

    def renormalize(self):
        """Ramène la norme à 1 et met le seuil en attente à la même échelle"""
        norm_sq = float(np.vdot(self.amplitudes, self.amplitudes).real)
        self.amplitudes /= math.sqrt(norm_sq)
        if self.threshold is not None:
            self.threshold /= norm_sq
        self.norm_sq = 1.0
        return self


def new_momentum_eigenstate(rho0: float, kbar: float, grid_size: int) -> QuantumState:
    """État propre d'impulsion ρ0 : β = frac(ρ0/kbar), une seule composante occupée"""
    validate_grid_size(grid_size)
    if kbar <= 0:
        raise InvalidParameterError("kbar doit être > 0", 'kbar')
    x = rho0 / kbar
    m = math.floor(x)
    beta = x - m
    if beta >= 1.0:
        m, beta = m + 1, 0.0
    half = grid_size // 2
    if not -half <= m < half:
        raise InvalidParameterError(
            f"ρ0/kbar = {x:.3f} hors de l'échelle [-{half}, {half})", 'rho0'
        )
    amplitudes = np.zeros(grid_size, dtype=complex)
    amplitudes[m + half] = 1.0
    return QuantumState(amplitudes, beta)


def measure_rho_sq(s: QuantumState, kbar: float) -> float:
    """⟨ρ²⟩ = Σ |c_m|² ((m + β) kbar)²"""
    probabilities = s.probabilities()
    return float(np.dot(probabilities, s.momenta(kbar) ** 2) / probabilities.sum())


def kinetic_phase(s: QuantumState, duration: float, kbar: float) -> np.ndarray:
    """exp(-i ρ_m² duration / (2 kbar)), la division par kbar vient de i·kbar ∂ψ = H'ψ"""
    shifted = s.ladder + s.beta
    return np.exp(-0.5j * kbar * duration * shifted ** 2)


def free_evolution(s: QuantumState, duration: float, kbar: float) -> QuantumState:
    if duration < 0:
        raise InvalidParameterError("duration doit être ≥ 0", 'duration')
    evolved = s.copy()
    if duration > 0:
        evolved.amplitudes *= kinetic_phase(s, duration, kbar)
    return evolved
