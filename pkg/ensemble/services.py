"""
Exécution des ensembles de trajectoires et balayages en kbar.

Les trajectoires sont découpées en blocs fixes distribués par joblib ; chaque
trajectoire tire tout son aléa de son propre flux (graine, indice), et les blocs
sont recollés dans l'ordre. Le résultat est identique au bit près quel que
soit le nombre de workers.
"""
import logging
import math

import numpy as np
from joblib import Parallel, delayed
from tqdm import tqdm

from analytics.formulas import quasilinear_rate
from analytics.series import (
    CurvePoint, DiffusionCurve, KickSeries, MomentumHistogram, RateKind, averaged_rate, diffusion_rate,
)
from classical.dynamics import classical_ensemble
from master import __version__
from master.exceptions import ConfigError, GridOverflowError, InvalidParameterError
from master.performance import timed
from quantum.propagator import KickPropagator
from quantum.state import measure_rho_sq, new_momentum_eigenstate
from .config import EnsembleConfig, SimulationMode
from .seeding import trajectory_rng

logger = logging.getLogger(__name__)

TRAJECTORY_BLOCK = 25
KBAR_MIN = 0.5
KBAR_MAX = 4.0 * math.pi


def sample_initial_momentum(params, rng: np.random.Generator) -> float:
    """ρ0 gaussien de moyenne nulle et d'écart type σ_ρ ; β = frac(ρ0/kbar) en découle"""
    return float(rng.normal(0.0, params.sigma_rho))


def _histogram_bins(state):
    """Indice j de l'intervalle [(j - ½)kbar, (j + ½)kbar) de chaque composante"""
    return np.floor(state.ladder + state.beta + 0.5).astype(np.int64)


def run_trajectory(cfg: EnsembleConfig, index: int, propagator: KickPropagator, histogram=False):
    """Une trajectoire : ⟨ρ²⟩ à chaque t' = n, sauts par kick, distribution finale"""
    rng = trajectory_rng(cfg.master_seed, index)
    kbar = cfg.params.kbar
    state = new_momentum_eigenstate(sample_initial_momentum(cfg.params, rng), kbar, cfg.grid_size)
    rho_sq = np.empty(cfg.n_kicks + 1)
    jumps = np.zeros(cfg.n_kicks)
    rho_sq[0] = measure_rho_sq(state, kbar)
    for n in range(cfg.n_kicks):
        try:
            state, events = propagator.kick(state, rng, n)
        except GridOverflowError as error:
            raise error.locate(trajectory=index, kick=n)
        jumps[n] = len(events)
        rho_sq[n + 1] = measure_rho_sq(state, kbar)

    final = None
    if histogram:
        half = cfg.grid_size // 2
        final = np.bincount(
            _histogram_bins(state) + half, weights=state.probabilities(), minlength=cfg.grid_size + 1
        )
    return rho_sq, jumps, final


def _run_block(cfg: EnsembleConfig, indices, histogram):
    propagator = KickPropagator(
        cfg.params, cfg.grid_size, cfg.resolved_substeps, cfg.recoil, cfg.leak_tolerance
    )
    rho_sq = np.empty((len(indices), cfg.n_kicks + 1))
    jumps = np.empty((len(indices), cfg.n_kicks))
    final = np.zeros(cfg.grid_size + 1) if histogram else None
    for row, index in enumerate(indices):
        rho_sq[row], jumps[row], distribution = run_trajectory(cfg, index, propagator, histogram)
        if histogram:
            final += distribution
    return rho_sq, jumps, final


def _blocks(n_trajectories):
    starts = range(0, n_trajectories, TRAJECTORY_BLOCK)
    return [list(range(start, min(start + TRAJECTORY_BLOCK, n_trajectories))) for start in starts]


def run_ensemble(cfg: EnsembleConfig, workers=1, progress=False, histogram=False) -> KickSeries:
    """
    Ensemble complet ; en mode classique, délègue à classical_ensemble.

    Args:
        cfg: configuration validée
        workers: nombre de processus joblib
        progress: barre tqdm sur les blocs de trajectoires
        histogram: accumule la distribution finale d'impulsion moyennée

    Returns:
        KickSeries avec les moyennes de groupes et les sauts par kick
    """
    if cfg.mode is SimulationMode.CLASSICAL:
        return classical_ensemble(
            cfg.params, cfg.n_kicks, cfg.classical_particles, cfg.master_seed, cfg.classical_noise,
            cfg.classical_substeps, cfg.recoil, cfg.n_groups, workers,
        )

    p = cfg.params
    blocks = _blocks(cfg.n_trajectories)
    label = f"Ensemble quantique κ={p.kappa} kbar={p.kbar:.4f} η={p.eta}"
    logger.info(
        f"{label}: {cfg.n_trajectories} trajectoires × {cfg.n_kicks} kicks, "
        f"grille {cfg.grid_size}, {cfg.resolved_substeps} sous-pas"
    )
    with timed(label, cfg.n_trajectories * cfg.n_kicks, 'kicks-trajectoires'):
        results = Parallel(n_jobs=workers)(
            delayed(_run_block)(cfg, block, histogram)
            for block in tqdm(blocks, desc=f"kbar={p.kbar:.3f}", disable=not progress, leave=False)
        )

    rho_sq = np.vstack([block_rho_sq for block_rho_sq, _, _ in results])
    jumps = np.vstack([block_jumps for _, block_jumps, _ in results])
    group_means = rho_sq.reshape(cfg.n_groups, cfg.group_size, cfg.n_kicks + 1).mean(axis=1)
    jump_group_means = jumps.reshape(cfg.n_groups, cfg.group_size, cfg.n_kicks).mean(axis=1)

    final = None
    if histogram:
        total = sum(block_final for _, _, block_final in results) / cfg.n_trajectories
        half = cfg.grid_size // 2
        final = MomentumHistogram(np.arange(-half, half + 1), total, p.kbar)

    logger.debug(f"{label}: sauts moyens par kick {jumps.mean():.4f}")
    return KickSeries(rho_sq.mean(axis=0), group_means, cfg.n_trajectories, p, jump_group_means, final)


def validate_kbar_values(kbar_values):
    kbar_values = [float(k) for k in kbar_values]
    for k in kbar_values:
        if not KBAR_MIN <= k <= KBAR_MAX:
            raise InvalidParameterError(f"kbar={k} hors de [{KBAR_MIN}, 4π]", 'kbar')
    if any(b <= a for a, b in zip(kbar_values, kbar_values[1:])):
        raise InvalidParameterError("les valeurs de kbar doivent être strictement croissantes", 'kbar')
    return kbar_values


def _window_estimates(series, cfg, rate_kind):
    """Estimations pour une fenêtre ; per_kick donne un point par kick"""
    if rate_kind == RateKind.PER_KICK:
        return [diffusion_rate(series, n) for n in range(series.n_kicks)]
    first, last = cfg.window(rate_kind)
    if last + 1 > series.n_kicks:
        raise ConfigError(
            rate_kind, f"la fenêtre {first}:{last} demande {last + 2} instants, la série n'a que {series.n_kicks} kicks"
        )
    return [averaged_rate(series, first, last)]


def curve_metadata(cfg: EnsembleConfig):
    p = cfg.params
    return {
        'kappa': p.kappa,
        'eta': p.eta,
        'alpha': p.alpha,
        'sigma_rho_over_kbar': p.sigma_rho_over_kbar,
        'mode': cfg.mode.value,
        'n_kicks': cfg.n_kicks,
        'n_trajectories': cfg.n_trajectories,
        'n_groups': cfg.n_groups,
        'seed': cfg.master_seed,
        'recoil': cfg.recoil.value,
        'grid': cfg.grid_size,
        'substeps': cfg.resolved_substeps,
        'leak_tolerance': cfg.leak_tolerance,
        'initial_window': list(cfg.initial_window),
        'late_window': list(cfg.late_window),
        'classical_particles': cfg.classical_particles,
        'classical_substeps': cfg.classical_substeps,
        'classical_noise': cfg.classical_noise,
        'version': __version__,
    }


def _check_rates(rates):
    for rate_kind in rates:
        if rate_kind not in RateKind.CHOICES:
            raise ConfigError('rates', f"fenêtre inconnue '{rate_kind}'")


def reference_series(cfg: EnsembleConfig, series: KickSeries, workers=1):
    """Série classique de comparaison ; en mode classique, la série elle-même"""
    if cfg.mode is SimulationMode.CLASSICAL:
        return series
    return classical_ensemble(
        cfg.params, cfg.n_kicks, cfg.classical_particles, cfg.master_seed, cfg.classical_noise,
        cfg.classical_substeps, cfg.recoil, cfg.n_groups, workers,
    )


def series_points(cfg: EnsembleConfig, series: KickSeries, rates, reference=None):
    """Points de courbe d'une série, regroupés par fenêtre dans l'ordre de rates"""
    _check_rates(rates)
    points = {}
    for rate_kind in rates:
        estimates = _window_estimates(series, cfg, rate_kind)
        references = _window_estimates(reference, cfg, rate_kind) if reference is not None else None
        points[rate_kind] = [
            CurvePoint(cfg.params.kbar, rate_kind, estimate, references[i].value if references else None)
            for i, estimate in enumerate(estimates)
        ]
        logger.info(
            f"kbar={cfg.params.kbar:.4f} {rate_kind}: D={estimates[0].value:.3f} ± {estimates[0].stderr:.3f} "
            f"(quasi-linéaire {quasilinear_rate(cfg.params.kappa):.2f})"
        )
    return points


def sweep_kbar(base_cfg: EnsembleConfig, kbar_values, rates=(RateKind.INITIAL,), workers=1, progress=False,
               classical_reference=True) -> DiffusionCurve:
    """
    Un ensemble par kbar (κ, η, α fixés) ; une estimation par fenêtre demandée,
    avec la valeur classique correspondante comme référence.
    """
    kbar_values = validate_kbar_values(kbar_values)
    _check_rates(rates)

    points = {rate_kind: [] for rate_kind in rates}
    for kbar in tqdm(kbar_values, desc="Balayage kbar", disable=not progress):
        cfg = base_cfg.with_params(kbar=kbar)
        series = run_ensemble(cfg, workers=workers, progress=progress)
        reference = None
        if classical_reference or cfg.mode is SimulationMode.CLASSICAL:
            reference = reference_series(cfg, series, workers)
        for rate_kind, kind_points in series_points(cfg, series, rates, reference).items():
            points[rate_kind].extend(kind_points)

    ordered = tuple(point for rate_kind in rates for point in points[rate_kind])
    return DiffusionCurve(ordered, curve_metadata(base_cfg))
