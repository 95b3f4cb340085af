"""
Rotor pulsé classique, vectorisé sur un ensemble de particules.

Pendant le pulse : dφ/dt' = ρ, dρ/dt' = -k sin φ, intégré par saute-mouton
(demi-kick, dérive, demi-kick). Ensuite vol libre φ ← φ + ρ(1 - α).
Le bruit de recul reprend la cinématique des sauts quantiques : avec la
probabilité η par kick, Δρ = s·kbar/2 + u·kbar/2 à un instant uniforme du pulse.
"""
import logging
from dataclasses import dataclass

import numpy as np
from joblib import Parallel, delayed

from analytics.series import KickSeries
from ensemble.seeding import CLASSICAL_STREAM, stream_rng, validate_seed
from master.exceptions import InvalidParameterError
from master.performance import timed
from params.types import DimensionlessParams
from quantum.recoil import RecoilDistribution, sample_recoil

logger = logging.getLogger(__name__)

DEFAULT_SUBSTEPS = 64
MIN_PARTICLES = 10
TWO_PI = 2.0 * np.pi


def wrap_angle(phi):
    wrapped = np.mod(phi, TWO_PI)
    # np.mod peut rendre exactement 2π pour un petit négatif
    return np.where(wrapped >= TWO_PI, 0.0, wrapped)


@dataclass
class ClassicalState:
    phi: np.ndarray
    rho: np.ndarray

    def __post_init__(self):
        self.phi = wrap_angle(np.asarray(self.phi, dtype=float))
        self.rho = np.array(self.rho, dtype=float)

    @property
    def size(self):
        return self.rho.size

    def copy(self):
        return ClassicalState(self.phi.copy(), self.rho.copy())


def leapfrog_pulse(phi, rho, kick_strength, dt, substeps, recoil_steps=None, recoil_shifts=None):
    """
    Intègre le pulse sur `substeps` pas de saute-mouton ; φ n'est pas replié.

    recoil_steps[i] est l'indice du sous-pas après lequel la particule i reçoit
    recoil_shifts[i] (-1 : pas de recul).
    """
    phi = np.array(phi, dtype=float)
    rho = np.array(rho, dtype=float)
    half = 0.5 * dt * kick_strength
    for step in range(substeps):
        rho -= half * np.sin(phi)
        phi += dt * rho
        rho -= half * np.sin(phi)
        if recoil_steps is not None:
            hit = recoil_steps == step
            if hit.any():
                rho[hit] += recoil_shifts[hit]
    return phi, rho


class ClassicalKick:
    """Un kick complet (pulse + vol libre) pour un jeu de paramètres"""

    def __init__(self, params: DimensionlessParams, substeps=DEFAULT_SUBSTEPS, noise_enabled=True,
                 recoil=RecoilDistribution.DIPOLE_PERPENDICULAR):
        if substeps < 1:
            raise InvalidParameterError("substeps doit être ≥ 1", 'classical_substeps')
        self.params = params
        self.substeps = substeps
        self.noise_enabled = noise_enabled and params.eta > 0
        self.recoil = RecoilDistribution(recoil)
        self.pulse_profile = params.pulse
        self.dt = self.pulse_profile.duration / substeps

    def draw_recoils(self, size, rng: np.random.Generator):
        """Tire les reculs d'un kick ; retourne (indices de sous-pas, Δρ, nombre de reculs)"""
        steps = np.full(size, -1, dtype=np.int64)
        shifts = np.zeros(size)
        triggered = np.flatnonzero(rng.random(size) < self.params.eta)
        count = triggered.size
        if count:
            steps[triggered] = rng.integers(self.substeps, size=count)
            absorbed = rng.choice((-1.0, 1.0), size=count)
            emitted = sample_recoil(self.recoil, rng, size=count)
            shifts[triggered] = 0.5 * self.params.kbar * (absorbed + emitted)
        return steps, shifts, count

    def kick(self, s: ClassicalState, rng: np.random.Generator):
        steps = shifts = None
        count = 0
        if self.noise_enabled:
            steps, shifts, count = self.draw_recoils(s.size, rng)
        phi, rho = leapfrog_pulse(s.phi, s.rho, self.params.kick_strength, self.dt, self.substeps, steps, shifts)
        phi += rho * self.pulse_profile.flight_duration
        return ClassicalState(phi, rho), count


def classical_kick(s: ClassicalState, p: DimensionlessParams, rng: np.random.Generator,
                   substeps=DEFAULT_SUBSTEPS, noise_enabled=True,
                   recoil=RecoilDistribution.DIPOLE_PERPENDICULAR) -> ClassicalState:
    evolved, _ = ClassicalKick(p, substeps, noise_enabled, recoil).kick(s, rng)
    return evolved


def standard_map_step(s: ClassicalState, kappa: float) -> ClassicalState:
    """Limite impulsionnelle : ρ' = ρ - κ sin φ, φ' = φ + ρ'"""
    rho = s.rho - kappa * np.sin(s.phi)
    return ClassicalState(s.phi + rho, rho)


def _run_group(params, n_kicks, size, seed, group, substeps, noise_enabled, recoil):
    rng = stream_rng(seed, CLASSICAL_STREAM, group)
    state = ClassicalState(rng.uniform(0.0, TWO_PI, size), rng.normal(0.0, params.sigma_rho, size))
    propagator = ClassicalKick(params, substeps, noise_enabled, recoil)
    rho_sq = np.empty(n_kicks + 1)
    recoils = np.zeros(n_kicks)
    rho_sq[0] = np.mean(state.rho ** 2)
    for n in range(n_kicks):
        state, recoils[n] = propagator.kick(state, rng)
        rho_sq[n + 1] = np.mean(state.rho ** 2)
    return rho_sq, recoils / size


def classical_ensemble(p: DimensionlessParams, n_kicks: int, n_particles: int, seed: int,
                       noise_enabled: bool = True, substeps=DEFAULT_SUBSTEPS,
                       recoil=RecoilDistribution.DIPOLE_PERPENDICULAR, n_groups=10, workers=1) -> KickSeries:
    """
    Moyennes de ρ² après chaque kick ; φ uniforme sur [0, 2π), ρ gaussien d'écart type σ_ρ.

    Chaque groupe de particules a son propre flux aléatoire dérivé de (seed, groupe) :
    le résultat ne dépend pas du nombre de workers.
    """
    if n_particles < MIN_PARTICLES:
        raise InvalidParameterError(f"au moins {MIN_PARTICLES} particules (reçu {n_particles})", 'classical_particles')
    if not 1 <= n_groups <= n_particles:
        raise InvalidParameterError(f"nombre de groupes invalide ({n_groups})", 'groups')
    if n_kicks < 1:
        raise InvalidParameterError("n_kicks doit être ≥ 1", 'kicks')
    validate_seed(seed)

    sizes = [len(chunk) for chunk in np.array_split(np.arange(n_particles), n_groups)]
    label = f"Ensemble classique κ={p.kappa} kbar={p.kbar} η={p.eta}"
    with timed(label, n_particles * n_kicks, 'kicks-particules'):
        results = Parallel(n_jobs=workers)(
            delayed(_run_group)(p, n_kicks, size, seed, group, substeps, noise_enabled, recoil)
            for group, size in enumerate(sizes)
        )
    group_means = np.array([rho_sq for rho_sq, _ in results])
    recoil_means = np.array([recoils for _, recoils in results])
    weights = np.asarray(sizes, dtype=float) / n_particles
    logger.debug(f"Reculs moyens par kick: {recoil_means.mean():.4f}")
    return KickSeries(weights @ group_means, group_means, n_particles, p, recoil_means)
