"""
Lecture des configurations d'exécution.

Deux formats : des jetons key=value séparés par des blancs (commentaires #),
ou un document YAML dont la racine est un dictionnaire. Les valeurs par défaut
viennent de settings.ROTOR_CONFIG ; toute clé inconnue est une erreur.
"""
import logging

import yaml
from django.conf import settings

from ensemble.config import EnsembleConfig
from master.exceptions import ConfigError, InvalidParameterError
from params.types import DimensionlessParams
from .serializers import RunConfigSerializer

logger = logging.getLogger(__name__)

# Clé de configuration -> clé de settings.ROTOR_CONFIG
SETTINGS_DEFAULTS = {
    'alpha': 'ALPHA',
    'eta': 'ETA',
    'sigma_rho_over_kbar': 'SIGMA_RHO_OVER_KBAR',
    'kicks': 'KICKS',
    'trajectories': 'TRAJECTORIES',
    'groups': 'GROUPS',
    'grid': 'GRID',
    'leak_tolerance': 'LEAK_TOLERANCE',
    'recoil': 'RECOIL',
    'initial_window': 'INITIAL_WINDOW',
    'late_window': 'LATE_WINDOW',
    'classical_particles': 'CLASSICAL_PARTICLES',
    'classical_substeps': 'CLASSICAL_SUBSTEPS',
    'classical_noise': 'CLASSICAL_NOISE',
}
FIXED_DEFAULTS = {'substeps': 'auto', 'mode': 'quantum', 'kbar': None}


def defaults():
    rotor = settings.ROTOR_CONFIG
    values = {key: rotor[name] for key, name in SETTINGS_DEFAULTS.items()}
    values.update(FIXED_DEFAULTS)
    return values


def _parse_tokens(text):
    values = {}
    for line in text.splitlines():
        line = line.split('#', 1)[0]
        for token in line.split():
            key, sep, value = token.partition('=')
            if not sep or not key:
                raise ConfigError(token, "jeton attendu sous la forme key=value")
            values[key.strip()] = value.strip()
    return values


def parse_text(text):
    """Texte brut -> dictionnaire de valeurs non validées"""
    if not text or not text.strip():
        return {}
    try:
        document = yaml.safe_load(text)
    except yaml.YAMLError:
        document = None
    if isinstance(document, dict):
        return {str(key): value for key, value in document.items()}
    return _parse_tokens(text)


def parse_overrides(overrides):
    """Liste de 'KEY=VALUE' (option --set répétable)"""
    return _parse_tokens('\n'.join(overrides or []))


def _first_error(errors):
    key, messages = next(iter(errors.items()))
    message = messages[0] if isinstance(messages, list) else messages
    return ConfigError(key, str(message))


def validate_values(values, sweeping=False):
    """Dictionnaire brut -> données validées par RunConfigSerializer"""
    serializer = RunConfigSerializer()
    for key in values:
        if key not in serializer.fields:
            raise ConfigError(key, "clé inconnue")
    data = defaults()
    data.update(values)
    for key in ('kappa', 'seed'):
        if data.get(key) in (None, ''):
            raise ConfigError(key, "clé obligatoire manquante")
    if not sweeping and data.get('kbar') in (None, ''):
        raise ConfigError('kbar', "clé obligatoire (sauf pour un balayage)")

    serializer = RunConfigSerializer(data=data)
    if not serializer.is_valid():
        raise _first_error(serializer.errors)
    return serializer.validated_data


def build_config(validated, sweeping=False) -> EnsembleConfig:
    try:
        params = DimensionlessParams(
            kappa=validated['kappa'],
            # Valeur provisoire pour un balayage : remplacée par chaque point
            kbar=validated['kbar'] if validated.get('kbar') is not None else 1.0,
            alpha=validated['alpha'],
            eta=validated['eta'],
            sigma_rho_over_kbar=validated['sigma_rho_over_kbar'],
        )
        return EnsembleConfig(
            params=params,
            master_seed=validated['seed'],
            n_kicks=validated['kicks'],
            n_trajectories=validated['trajectories'],
            n_groups=validated['groups'],
            grid_size=validated['grid'],
            substeps=validated['substeps'],
            recoil=validated['recoil'],
            mode=validated['mode'],
            leak_tolerance=validated['leak_tolerance'],
            initial_window=tuple(validated['initial_window']),
            late_window=tuple(validated['late_window']),
            classical_particles=validated['classical_particles'],
            classical_substeps=validated['classical_substeps'],
            classical_noise=validated['classical_noise'],
        )
    except InvalidParameterError as error:
        raise ConfigError(error.name or 'config', str(error))


def parse_config(text, overrides=None, sweeping=False) -> EnsembleConfig:
    """
    Configuration complète, valeurs par défaut appliquées.

    Args:
        text: contenu du fichier --config (key=value ou YAML), éventuellement vide
        overrides: jetons --set KEY=VALUE, prioritaires sur le fichier
        sweeping: kbar devient facultatif

    Returns:
        EnsembleConfig validée
    """
    values = parse_text(text)
    values.update(parse_overrides(overrides))
    cfg = build_config(validate_values(values, sweeping), sweeping)
    logger.debug(f"Configuration lue: {config_to_dict(cfg)}")
    return cfg


def config_to_dict(cfg: EnsembleConfig):
    """Forme plate réinjectable dans parse_config (registre, fichiers .run.json)"""
    p = cfg.params
    return {
        'kappa': p.kappa,
        'kbar': p.kbar,
        'eta': p.eta,
        'alpha': p.alpha,
        'sigma_rho_over_kbar': p.sigma_rho_over_kbar,
        'kicks': cfg.n_kicks,
        'trajectories': cfg.n_trajectories,
        'groups': cfg.n_groups,
        'grid': cfg.grid_size,
        'substeps': cfg.substeps if cfg.substeps is not None else 'auto',
        'recoil': cfg.recoil.value,
        'seed': cfg.master_seed,
        'mode': cfg.mode.value,
        'leak_tolerance': cfg.leak_tolerance,
        'initial_window': f"{cfg.initial_window[0]}:{cfg.initial_window[1]}",
        'late_window': f"{cfg.late_window[0]}:{cfg.late_window[1]}",
        'classical_particles': cfg.classical_particles,
        'classical_substeps': cfg.classical_substeps,
        'classical_noise': cfg.classical_noise,
    }
