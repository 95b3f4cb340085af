"""
Passage des paramètres de laboratoire aux unités réduites du rotor pulsé.

Les désaccords sont des entrées signées ; κ n'est physique (potentiel
attractif avec le signe de kick utilisé ici) que s'il sort positif.
"""
import logging
from fractions import Fraction

from master.exceptions import InvalidParameterError
from .types import DimensionlessParams, PhysicalParams

logger = logging.getLogger(__name__)

# Populations égales dans tous les sous-niveaux Zeeman (F=4 -> F'=5,4,3)
SUBLEVEL_WEIGHTS = (Fraction(11, 27), Fraction(7, 36), Fraction(7, 108))


def sublevel_weights():
    """Poids (s45, s44, s43) des transitions hyperfines, rationnels exacts"""
    return SUBLEVEL_WEIGHTS


def effective_potential_strength(p: PhysicalParams) -> float:
    """Ω_eff = Ω²(s45/δ45 + s44/δ44 + s43/δ43)"""
    detunings = (p.delta45, p.delta44, p.delta43)
    if any(d == 0 for d in detunings):
        raise InvalidParameterError("Désaccord nul : Ω_eff indéfini", 'detuning')
    s45, s44, s43 = (float(s) for s in SUBLEVEL_WEIGHTS)
    return p.rabi_frequency_omega ** 2 * (s45 / p.delta45 + s44 / p.delta44 + s43 / p.delta43)


def to_dimensionless(p: PhysicalParams, eta: float, sigma_rho_over_kbar: float = 4.0) -> DimensionlessParams:
    """
    κ = Ω_eff·ω_R·T·τ_p, kbar = 8·ω_R·T, α = τ_p/T.

    eta reste une entrée indépendante : la décohérence est caractérisée
    uniquement par la probabilité d'émission spontanée par kick.
    """
    omega_eff = effective_potential_strength(p)
    kappa = omega_eff * p.recoil_frequency_omega_r * p.pulse_period_T * p.pulse_length_tau_p
    if kappa < 0:
        raise InvalidParameterError(
            f"κ négatif ({kappa:.4g}) : le signe des désaccords donne un potentiel de signe opposé", 'kappa'
        )
    params = DimensionlessParams(
        kappa=kappa,
        kbar=8.0 * p.recoil_frequency_omega_r * p.pulse_period_T,
        alpha=p.pulse_length_tau_p / p.pulse_period_T,
        eta=eta,
        sigma_rho_over_kbar=sigma_rho_over_kbar,
    )
    logger.debug(f"Conversion: κ={params.kappa:.4g}, kbar={params.kbar:.4g}, α={params.alpha:.4g}")
    return params
