"""
Jeux de paramètres du rotor pulsé.

PhysicalParams décrit l'expérience (fréquences en rad/s, durées en s) ;
DimensionlessParams décrit le système réduit qui pilote toute la dynamique.
"""
import math
from dataclasses import dataclass
from enum import Enum

from master.exceptions import InvalidParameterError


class PulseShape(str, Enum):
    SQUARE = 'square'


@dataclass(frozen=True)
class PulseProfile:
    """Profil f(t') d'un pulse sur une période réduite"""
    alpha: float
    shape: PulseShape = PulseShape.SQUARE

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise InvalidParameterError(f"alpha doit être dans ]0, 1[ (reçu {self.alpha})", 'alpha')

    @property
    def duration(self):
        """Durée du pulse en période réduite (seule la forme carrée existe)"""
        return self.alpha

    @property
    def flight_duration(self):
        return 1.0 - self.duration

    def value(self, t):
        """f(t') : 1 pendant ]0, alpha[ de chaque période, 0 sinon"""
        phase = t - math.floor(t)
        return 1.0 if 0.0 < phase < self.alpha else 0.0


@dataclass(frozen=True)
class PhysicalParams:
    rabi_frequency_omega: float
    delta45: float
    delta44: float
    delta43: float
    pulse_period_T: float
    pulse_length_tau_p: float
    recoil_frequency_omega_r: float

    def __post_init__(self):
        for name in ('delta45', 'delta44', 'delta43'):
            if getattr(self, name) == 0:
                raise InvalidParameterError(f"{name}: désaccord nul", name)
        if not self.pulse_length_tau_p > 0:
            raise InvalidParameterError("pulse_length_tau_p doit être > 0", 'pulse_length_tau_p')
        if not self.pulse_period_T > self.pulse_length_tau_p:
            raise InvalidParameterError(
                "pulse_period_T doit être strictement supérieur à pulse_length_tau_p", 'pulse_period_T'
            )
        if not self.recoil_frequency_omega_r > 0:
            raise InvalidParameterError("recoil_frequency_omega_r doit être > 0", 'recoil_frequency_omega_r')


@dataclass(frozen=True)
class DimensionlessParams:
    """
    Système réduit : H' = ρ²/2 - k cos φ Σ f(t'-n), avec [φ, ρ] = i·kbar.
    """
    kappa: float
    kbar: float
    alpha: float = 0.005
    eta: float = 0.0
    sigma_rho_over_kbar: float = 4.0
    shape: PulseShape = PulseShape.SQUARE

    def __post_init__(self):
        checks = (
            ('kappa', self.kappa >= 0 and math.isfinite(self.kappa), "kappa doit être ≥ 0"),
            ('kbar', self.kbar > 0 and math.isfinite(self.kbar), "kbar doit être > 0"),
            ('alpha', 0.0 < self.alpha < 1.0, "alpha doit être dans ]0, 1["),
            ('eta', 0.0 <= self.eta <= 1.0, "eta doit être dans [0, 1]"),
            ('sigma_rho_over_kbar', self.sigma_rho_over_kbar >= 0, "sigma_rho_over_kbar doit être ≥ 0"),
        )
        for name, ok, message in checks:
            if not ok:
                raise InvalidParameterError(f"{message} (reçu {getattr(self, name)})", name)
        if not math.isfinite(self.kick_strength):
            raise InvalidParameterError("k = kappa/alpha doit être fini", 'alpha')

    @property
    def kick_strength(self):
        """k = κ/α, amplitude du potentiel pendant le pulse"""
        return self.kappa / self.alpha

    @property
    def sigma_rho(self):
        return self.sigma_rho_over_kbar * self.kbar

    @property
    def pulse(self):
        return PulseProfile(alpha=self.alpha, shape=self.shape)

    def with_changes(self, **changes):
        values = {
            'kappa': self.kappa,
            'kbar': self.kbar,
            'alpha': self.alpha,
            'eta': self.eta,
            'sigma_rho_over_kbar': self.sigma_rho_over_kbar,
            'shape': self.shape,
        }
        values.update(changes)
        return DimensionlessParams(**values)
