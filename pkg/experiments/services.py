"""
Comparaison du taux tardif simulé avec la somme pondérée des D₀(n).

Pour chaque kbar, deux ensembles : l'un décohérent (η de la configuration),
l'autre cohérent (η = 0) dont la série D₀(n) alimente dinf_weighted.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from tqdm import tqdm

from analytics.formulas import dinf_exponential_model, dinf_weighted
from analytics.series import RateKind, averaged_rate, group_stderr, rate_series
from ensemble.config import EnsembleConfig, SimulationMode
from ensemble.services import curve_metadata, run_ensemble, validate_kbar_values
from master.exceptions import ConfigError

logger = logging.getLogger(__name__)

MODEL_NOTE = (
    "D_inf_model : D₀(0) = D₀(1) = κ²/4 puis décroissance exponentielle de D_q "
    "avec n_b = 2D_q/kbar² ; hypothèse de localisation, non fiable près de kbar ≈ 2π"
)


@dataclass(frozen=True)
class DinfComparison:
    kbar: float
    kappa: float
    eta: float
    D_inf_simulated: float
    D_inf_simulated_stderr: float
    D_inf_weighted: float
    D_inf_weighted_stderr: float
    discrepancy_sigma: Optional[float]
    D_inf_model: float
    model_based: bool
    n_trajectories: int
    seed: int


@dataclass(frozen=True)
class DinfReport:
    rows: tuple = ()
    metadata: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.rows)


def weighted_from_coherent(series, eta):
    """dinf_weighted sur la moyenne d'ensemble, erreur par dispersion entre groupes"""
    value = dinf_weighted(eta, rate_series(series))
    per_group = [dinf_weighted(eta, 0.5 * np.diff(means)) for means in series.group_means]
    return value, group_stderr(per_group)


def discrepancy(a, a_err, b, b_err):
    combined = math.hypot(a_err, b_err)
    if combined == 0.0:
        return None
    return (a - b) / combined


def compare_dinf(cfg: EnsembleConfig, kbar_values, workers=1, progress=False) -> DinfReport:
    """
    D_∞ simulé (fenêtre tardive) contre D_∞ pondéré (série η = 0), par kbar.

    Args:
        cfg: configuration de base, η > 0 obligatoire
        kbar_values: valeurs strictement croissantes dans [0.5, 4π]
        workers: processus joblib par ensemble
        progress: barres tqdm

    Returns:
        DinfReport (une ligne par kbar, métadonnées de la configuration)
    """
    eta = cfg.params.eta
    if not eta > 0.0:
        raise ConfigError('eta', "compare_dinf exige η > 0")
    if cfg.mode is not SimulationMode.QUANTUM:
        raise ConfigError('mode', "compare_dinf ne s'applique qu'au mode quantique")
    kbar_values = validate_kbar_values(kbar_values)
    first, last = cfg.window(RateKind.LATE)
    if last + 1 > cfg.n_kicks:
        raise ConfigError(
            RateKind.LATE, f"la fenêtre {first}:{last} demande {last + 2} instants, la série n'a que {cfg.n_kicks} kicks"
        )

    rows = []
    for kbar in tqdm(kbar_values, desc="Comparaison D∞", disable=not progress):
        decoherent_cfg = cfg.with_params(kbar=kbar)
        coherent_cfg = cfg.with_params(kbar=kbar, eta=0.0)

        simulated = averaged_rate(run_ensemble(decoherent_cfg, workers=workers, progress=progress), first, last)
        weighted, weighted_err = weighted_from_coherent(
            run_ensemble(coherent_cfg, workers=workers, progress=progress), eta
        )
        sigma = discrepancy(simulated.value, simulated.stderr, weighted, weighted_err)
        rows.append(DinfComparison(
            kbar=kbar,
            kappa=cfg.params.kappa,
            eta=eta,
            D_inf_simulated=simulated.value,
            D_inf_simulated_stderr=simulated.stderr,
            D_inf_weighted=weighted,
            D_inf_weighted_stderr=weighted_err,
            discrepancy_sigma=sigma,
            D_inf_model=dinf_exponential_model(cfg.params.kappa, kbar, eta),
            model_based=True,
            n_trajectories=cfg.n_trajectories,
            seed=cfg.master_seed,
        ))
        if sigma is not None and abs(sigma) > 3.0:
            logger.warning(f"kbar={kbar:.4f}: écart D∞ de {sigma:.1f} σ entre simulation et somme pondérée")
        else:
            logger.info(
                f"kbar={kbar:.4f}: D∞ simulé {simulated.value:.3f} ± {simulated.stderr:.3f}, "
                f"pondéré {weighted:.3f} ± {weighted_err:.3f}"
            )

    metadata = curve_metadata(cfg)
    metadata['model_note'] = MODEL_NOTE
    return DinfReport(tuple(rows), metadata)
