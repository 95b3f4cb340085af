"""
Propagation d'une trajectoire quantique du rotor pulsé avec émission spontanée.

Pendant un pulse de durée α, pas fractionnés symétriques :
    cinétique δt/2 (représentation impulsion)
    potentiel + décroissance δt (représentation position, par FFT)
    cinétique δt/2
La décroissance non hermitienne exp(-(η/α) cos²(φ/2) δt) fait baisser la norme ;
un saut cos(φ/2) e^{iuφ/2} est appliqué en fin de sous-pas dès que la norme
au carré passe sous le seuil uniforme tiré pour la trajectoire.
Entre deux pulses, évolution libre exacte de durée 1 - α.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import fft

from master.exceptions import GridOverflowError, InvalidParameterError, NumericalDegeneracyError
from params.types import DimensionlessParams
from .recoil import RecoilDistribution, sample_recoil
from .state import QuantumState, kinetic_phase, validate_grid_size

logger = logging.getLogger(__name__)

DEFAULT_LEAK_TOLERANCE = 1e-8
EDGE_FRACTION = 0.01


def default_substeps(kappa):
    """
    max(150, ceil(12κ)) : erreur de Strang relative sur ⟨ρ²⟩ < 1e-6 pour kbar ≥ 0.5.

    L'erreur varie comme (κ/substeps)², le rapport substeps/κ est donc borné.
    """
    return max(150, math.ceil(12 * kappa))


@dataclass(frozen=True)
class JumpEvent:
    kick_index: int
    time_in_pulse: float
    recoil_u: float
    absorption_branch_shift: float

    def __post_init__(self):
        if not -1.0 <= self.recoil_u <= 1.0:
            raise InvalidParameterError(f"recoil_u hors de [-1, 1] ({self.recoil_u})", 'recoil_u')


def edge_width(grid_size):
    """Nombre d'indices surveillés de chaque côté (2 % de l'échelle au total)"""
    return max(1, math.ceil(EDGE_FRACTION * grid_size))


def edge_population(s: QuantumState):
    width = edge_width(s.grid_size)
    probabilities = s.probabilities()
    leaked = probabilities[:width].sum() + probabilities[-width:].sum()
    return float(leaked / probabilities.sum())


def check_leak(s: QuantumState, tolerance):
    leaked = edge_population(s)
    if leaked > tolerance:
        raise GridOverflowError(leaked, tolerance)


def apply_jump(s: QuantumState, u: float, kbar: float) -> QuantumState:
    """
    Applique cos(φ/2) e^{iuφ/2} = ½(e^{i(1+u)φ/2} + e^{i(u-1)φ/2}).

    Les deux branches diffèrent d'une unité d'échelle : le résultat vit sur
    une seule échelle β' = frac(β + (1+u)/2), avec c'_n = ½(c_{n-Δ} + c_{n+1-Δ})
    où Δ = floor(β + (1+u)/2) est la retenue entière.
    """
    if not -1.0 <= u <= 1.0:
        raise InvalidParameterError(f"u hors de [-1, 1] ({u})", 'u')
    shifted = s.beta + 0.5 * (1.0 + u)
    carry = math.floor(shifted)
    beta = shifted - carry
    if beta >= 1.0:
        carry, beta = carry + 1, 0.0

    c = s.amplitudes
    zero = np.zeros(1, dtype=complex)
    if carry == 0:
        # c'_n = ½(c_n + c_{n+1})
        upper = np.concatenate((c[1:], zero))
        jumped = 0.5 * (c + upper)
    else:
        # c'_n = ½(c_{n-1} + c_n)
        lower = np.concatenate((zero, c[:-1]))
        jumped = 0.5 * (lower + c)

    norm_sq = float(np.vdot(jumped, jumped).real)
    if norm_sq <= 1e-300:
        raise NumericalDegeneracyError("Norme nulle après le saut quantique")
    logger.debug(f"Saut: u={u:+.3f}, recul moyen {0.5 * u * kbar:+.4f}, β {s.beta:.4f} -> {beta:.4f}")
    return QuantumState(jumped / math.sqrt(norm_sq), beta, 1.0, None)


class KickPropagator:
    """
    Propagateur d'un kick complet (pulse + vol libre) pour un jeu de paramètres.

    Les facteurs de phase en position ne dépendent pas de β et sont calculés
    une seule fois ; les facteurs cinétiques sont recalculés quand un saut
    change la quasi-impulsion.
    """

    def __init__(self, params: DimensionlessParams, grid_size: int, substeps=None,
                 recoil=RecoilDistribution.DIPOLE_PERPENDICULAR,
                 leak_tolerance=DEFAULT_LEAK_TOLERANCE):
        validate_grid_size(grid_size)
        self.params = params
        self.grid_size = grid_size
        self.substeps = substeps if substeps is not None else default_substeps(params.kappa)
        if self.substeps < 1:
            raise InvalidParameterError("substeps doit être ≥ 1", 'substeps')
        self.recoil = RecoilDistribution(recoil)
        self.leak_tolerance = leak_tolerance
        self.pulse_profile = params.pulse
        self.dt = self.pulse_profile.duration / self.substeps
        self.dissipative = params.eta > 0

        # Grille de position φ_j = 2πj/N (ordre FFT des amplitudes)
        phi = 2.0 * np.pi * np.arange(grid_size) / grid_size
        potential_phase = params.kick_strength * np.cos(phi) * self.dt / params.kbar
        self.position_factor = np.exp(1j * potential_phase)
        if self.dissipative:
            decay = (params.eta / self.pulse_profile.duration) * np.cos(0.5 * phi) ** 2 * self.dt
            self.position_factor *= np.exp(-decay)
        self._ladder_fft = fft.ifftshift(np.arange(-grid_size // 2, grid_size // 2))

    def _half_kinetic(self, beta):
        shifted = self._ladder_fft + beta
        return np.exp(-0.25j * self.params.kbar * self.dt * shifted ** 2)

    def _apply_position_factor(self, c):
        u = fft.ifft(c, norm='forward')
        u *= self.position_factor
        return fft.fft(u, norm='forward')

    def pulse(self, s: QuantumState, rng: np.random.Generator, kick_index=0):
        """Évolue l'état sur un pulse ; retourne (état renormalisé, sauts)"""
        if s.grid_size != self.grid_size:
            raise InvalidParameterError(
                f"Taille de grille de l'état ({s.grid_size}) ≠ propagateur ({self.grid_size})", 'grid'
            )
        jumps = []
        threshold = s.threshold
        if self.dissipative and threshold is None:
            threshold = rng.random()

        beta = s.beta
        half_kinetic = self._half_kinetic(beta)
        c = fft.ifftshift(s.amplitudes * math.sqrt(s.norm_sq))
        for step in range(self.substeps):
            c *= half_kinetic
            c = self._apply_position_factor(c)
            c *= half_kinetic
            if not self.dissipative:
                continue
            norm_sq = float(np.vdot(c, c).real)
            if norm_sq < threshold:
                u = sample_recoil(self.recoil, rng)
                jumped = apply_jump(QuantumState(fft.fftshift(c), beta), u, self.params.kbar)
                jumps.append(JumpEvent(
                    kick_index=kick_index,
                    time_in_pulse=(step + 1) * self.dt,
                    recoil_u=u,
                    absorption_branch_shift=(jumped.beta - beta) % 1.0,
                ))
                beta = jumped.beta
                half_kinetic = self._half_kinetic(beta)
                c = fft.ifftshift(jumped.amplitudes)
                threshold = rng.random()

        evolved = QuantumState(fft.fftshift(c), beta, 1.0, None)
        if self.dissipative:
            evolved.threshold = threshold
            evolved.renormalize()
        check_leak(evolved, self.leak_tolerance)
        return evolved, jumps

    def free_flight(self, s: QuantumState):
        """Vol libre de durée 1 - α (en place, la norme est conservée)"""
        s.amplitudes *= kinetic_phase(s, self.pulse_profile.flight_duration, self.params.kbar)
        return s

    def kick(self, s: QuantumState, rng: np.random.Generator, kick_index=0):
        """Un kick complet : de t' = n à t' = n + 1"""
        evolved, jumps = self.pulse(s, rng, kick_index)
        return self.free_flight(evolved), jumps


def pulse_step(s: QuantumState, p: DimensionlessParams, rng: np.random.Generator, substeps=None,
               recoil=RecoilDistribution.DIPOLE_PERPENDICULAR, leak_tolerance=DEFAULT_LEAK_TOLERANCE,
               kick_index=0):
    """Un pulse isolé ; pour des kicks répétés, réutiliser un KickPropagator"""
    propagator = KickPropagator(p, s.grid_size, substeps, recoil, leak_tolerance)
    return propagator.pulse(s, rng, kick_index)
