"""
Expressions analytiques des taux de diffusion du rotor pulsé.

Tous les taux retournés sont des D (la moitié de la croissance de ⟨ρ²⟩ par kick),
jamais des 2D.
"""
import logging
import math
from typing import NamedTuple

import numpy as np
from scipy import special

from master.exceptions import InvalidParameterError
from quantum.recoil import RecoilDistribution

logger = logging.getLogger(__name__)

BESSEL_MAX_ARGUMENT = 50.0


def bessel_j(order, x):
    """J_order(x) pour order ∈ {0, 1, 2, 3} et |x| ≤ 50"""
    if order not in (0, 1, 2, 3):
        raise InvalidParameterError(f"ordre de Bessel {order} non supporté (0..3)", 'order')
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > BESSEL_MAX_ARGUMENT):
        raise InvalidParameterError(f"|x| > {BESSEL_MAX_ARGUMENT} hors du domaine des balayages", 'x')
    values = special.jv(order, x)
    return float(values) if values.ndim == 0 else values


def quantum_kick_strength(kappa, kbar):
    """K_q = 2κ sin(kbar/2)/kbar, qui tend vers κ quand kbar → 0"""
    return kappa * np.sinc(kbar / (2.0 * np.pi))


def double_kick_strength(kappa, kbar):
    """K_2q = 2κ sin(kbar)/kbar"""
    return 2.0 * kappa * np.sinc(kbar / np.pi)


def quasilinear_rate(kappa):
    """D(0) = κ²/4 pour des phases uniformément réparties"""
    return 0.25 * kappa ** 2


def _check_kbar(kbar):
    if not kbar > 0:
        raise InvalidParameterError(f"kbar doit être > 0 (reçu {kbar})", 'kbar')


def d1_analytic(kappa, kbar, sigma_rho):
    """D(1) pour une distribution initiale gaussienne d'écart type σ_ρ"""
    _check_kbar(kbar)
    k_q = quantum_kick_strength(kappa, kbar)
    k_2q = double_kick_strength(kappa, kbar)
    s2 = sigma_rho ** 2
    half_width = math.exp(-0.5 * s2)
    twice_d1 = (
        0.5 * kappa ** 2 * (1.0 - bessel_j(2, k_2q) * math.exp(-2.0 * s2))
        - 2.0 * kappa * bessel_j(1, k_q) * s2 * half_width
        + kappa ** 2 * (bessel_j(0, k_q) - bessel_j(2, k_q)) * math.cos(0.5 * kbar) * half_width
    )
    return 0.5 * twice_d1


def dq_shepelyansky(kappa, kbar):
    """
    D_q = (κ²/2)(½ − J₂(K_q) − J₁²(K_q) + J₂²(K_q) + J₃²(K_q)).

    kbar = 0 est accepté : K_q = κ et on retrouve le taux classique corrigé
    des corrélations.
    """
    if kbar < 0:
        raise InvalidParameterError(f"kbar doit être ≥ 0 (reçu {kbar})", 'kbar')
    k_q = quantum_kick_strength(kappa, kbar)
    j1, j2, j3 = (bessel_j(order, k_q) for order in (1, 2, 3))
    return 0.5 * kappa ** 2 * (0.5 - j2 - j1 ** 2 + j2 ** 2 + j3 ** 2)


def classical_rate(kappa):
    """Taux classique avec corrélations à deux kicks (limite kbar → 0 de D_q)"""
    return dq_shepelyansky(kappa, 0.0)


def _check_eta(eta):
    if not 0.0 < eta <= 1.0:
        raise InvalidParameterError(f"eta doit être dans ]0, 1] (reçu {eta})", 'eta')


def dinf_weights(eta, n_terms):
    """Poids η(1−η)ⁿ pour n < N puis poids de queue (1−η)^N porté par le dernier terme"""
    _check_eta(eta)
    if n_terms < 1:
        raise InvalidParameterError("série D₀(n) vide", 'd0_series')
    weights = eta * (1.0 - eta) ** np.arange(n_terms)
    weights[-1] += (1.0 - eta) ** n_terms
    return weights


def dinf_weighted(eta, d0_series):
    """D_∞ ≈ Σ η(1−η)ⁿ D₀(n), la queue étant fermée par la dernière valeur disponible"""
    d0_series = np.asarray(d0_series, dtype=float)
    weights = dinf_weights(eta, d0_series.size)
    return float(np.dot(weights, d0_series))


def break_time(kappa, kbar):
    """n_b = 2D_q/kbar², estimation standard du temps de localisation"""
    _check_kbar(kbar)
    return 2.0 * dq_shepelyansky(kappa, kbar) / kbar ** 2


def dinf_exponential_model(kappa, kbar, eta):
    """
    D_∞ en forme fermée avec D₀(0) = D₀(1) = κ²/4 et D₀(n ≥ 2) = D_q e^{−(n−2)/n_b}.

    Modèle heuristique : n_b = 2D_q/kbar² est une hypothèse de localisation,
    il n'est pas fiable près de la résonance kbar ≈ 2π.
    """
    _check_kbar(kbar)
    _check_eta(eta)
    d_q = dq_shepelyansky(kappa, kbar)
    n_b = break_time(kappa, kbar)
    relaxation = math.exp(-1.0 / n_b) if n_b > 0 else 0.0
    survival = 1.0 - eta
    return (
        eta * (2.0 - eta) * quasilinear_rate(kappa)
        + eta * survival ** 2 * d_q / (1.0 - survival * relaxation)
    )


class RecoilHeating(NamedTuple):
    rho_sq_per_kick: float
    rate: float


def recoil_heating(eta, kbar, recoil=RecoilDistribution.DIPOLE_PERPENDICULAR):
    """⟨Δρ²⟩ = η (kbar²/4)(1 + Var u) par kick, et l'incrément de D correspondant"""
    if not 0.0 <= eta <= 1.0:
        raise InvalidParameterError(f"eta doit être dans [0, 1] (reçu {eta})", 'eta')
    variance = RecoilDistribution(recoil).variance
    rho_sq = eta * 0.25 * kbar ** 2 * (1.0 + variance)
    return RecoilHeating(rho_sq, 0.5 * rho_sq)
