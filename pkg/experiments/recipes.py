"""
Recettes de reproduction des figures.

Chaque recette fige les paramètres physiques (κ, η, α, grille de kbar, fenêtres) ;
seuls la taille d'ensemble et la graine restent libres. Une recette produit un
ou plusieurs panneaux, chacun sérialisé dans son propre fichier.
"""
import logging
from dataclasses import dataclass, field

from analytics.formulas import classical_rate, d1_analytic, dq_shepelyansky
from analytics.series import RateKind
from ensemble.services import sweep_kbar
from .config_parser import build_config, config_to_dict, validate_values
from .emitters import emit_curve, emit_dinf_report, emit_records
from .services import compare_dinf

logger = logging.getLogger(__name__)

SWEEP_KBAR = (1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0, 5.5, 5.8, 6.28, 6.8)
DINF_KBAR = (1.5, 2.0, 3.0, 4.0, 5.0, 6.0)
RESONANCE_KBAR = (2.0, 6.0, 6.28, 6.4)
ANALYTIC_COLUMNS = ['kbar', 'kappa', 'D_q', 'D1', 'classical_D']


@dataclass(frozen=True)
class Panel:
    """Un fichier de sortie : balayage en kbar, comparaison D∞ ou table analytique"""
    suffix: str
    values: dict
    kbar_values: tuple
    rates: tuple = (RateKind.INITIAL,)
    kind: str = 'sweep'


@dataclass(frozen=True)
class FigureRecipe:
    number: int
    description: str
    panels: tuple = field(default_factory=tuple)


@dataclass(frozen=True)
class PanelOutput:
    suffix: str
    payload: bytes
    config: dict


FIGURES = {
    1: FigureRecipe(1, "κ=9, η=10 %, α=0.005 : D(n) par kick et moyenne D(2−5) en fonction de kbar", (
        Panel('quantum', {'kappa': 9, 'eta': 0.1, 'alpha': 0.005}, SWEEP_KBAR,
              (RateKind.PER_KICK, RateKind.INITIAL)),
        Panel('classical_no_noise', {'kappa': 9, 'eta': 0.1, 'alpha': 0.005, 'mode': 'classical',
                                     'classical_noise': False}, SWEEP_KBAR),
    )),
    2: FigureRecipe(2, "κ ∈ {6, 9, 12}, η=10 % : D(2−5) en fonction de kbar et courbes analytiques", (
        Panel('kappa6', {'kappa': 6, 'eta': 0.1}, SWEEP_KBAR),
        Panel('kappa9', {'kappa': 9, 'eta': 0.1}, SWEEP_KBAR),
        Panel('kappa12', {'kappa': 12, 'eta': 0.1}, SWEEP_KBAR),
        Panel('analytic', {'kappa': (6, 9, 12)}, SWEEP_KBAR, kind='table'),
    )),
    3: FigureRecipe(3, "κ=10, η ∈ {2 %, 5 %, 10 %} : D∞ simulé contre somme pondérée des D₀(n)", (
        Panel('eta0.02', {'kappa': 10, 'eta': 0.02}, DINF_KBAR, kind='dinf'),
        Panel('eta0.05', {'kappa': 10, 'eta': 0.05}, DINF_KBAR, kind='dinf'),
        Panel('eta0.1', {'kappa': 10, 'eta': 0.1}, DINF_KBAR, kind='dinf'),
    )),
    4: FigureRecipe(4, "κ=9, η=0 : D(n) par kick près de la résonance quantique", (
        Panel('coherent', {'kappa': 9, 'eta': 0.0}, RESONANCE_KBAR, (RateKind.PER_KICK,)),
    )),
}


def analytic_rows(kappas, kbar_values, sigma_rho_over_kbar=4.0):
    """D_q, D(1) analytique et taux classique pour chaque (κ, kbar)"""
    return [
        {
            'kbar': kbar,
            'kappa': kappa,
            'D_q': dq_shepelyansky(kappa, kbar),
            'D1': d1_analytic(kappa, kbar, sigma_rho_over_kbar * kbar),
            'classical_D': classical_rate(kappa),
        }
        for kappa in kappas
        for kbar in kbar_values
    ]


def panel_values(panel: Panel, knobs: dict):
    values = dict(knobs)
    values.update(panel.values)
    return values


def run_panel(panel: Panel, knobs: dict, fmt='csv', workers=1, progress=False) -> PanelOutput:
    values = panel_values(panel, knobs)
    if panel.kind == 'table':
        rows = analytic_rows(values['kappa'], panel.kbar_values)
        return PanelOutput(panel.suffix, emit_records(rows, ANALYTIC_COLUMNS, fmt), values)

    cfg = build_config(validate_values(values, sweeping=True), sweeping=True)
    if panel.kind == 'dinf':
        payload = emit_dinf_report(compare_dinf(cfg, panel.kbar_values, workers, progress), fmt)
    else:
        curve = sweep_kbar(cfg, panel.kbar_values, panel.rates, workers=workers, progress=progress)
        payload = emit_curve(curve, fmt)
    return PanelOutput(panel.suffix, payload, config_to_dict(cfg))


def run_recipe(recipe: FigureRecipe, trajectories, seed, fmt='csv', workers=1, progress=False):
    """
    Exécute tous les panneaux d'une figure.

    Args:
        recipe: entrée de FIGURES
        trajectories: taille d'ensemble (multiple du nombre de groupes)
        seed: graine maîtresse commune à tous les panneaux

    Returns:
        liste de PanelOutput, dans l'ordre des panneaux
    """
    knobs = {'trajectories': trajectories, 'seed': seed}
    logger.info(f"Figure {recipe.number} : {recipe.description} ({trajectories} trajectoires, graine {seed})")
    return [run_panel(panel, knobs, fmt, workers, progress) for panel in recipe.panels]
