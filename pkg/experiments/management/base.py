"""
Socle commun des commandes de simulation.

Options partagées, lecture de la configuration, écriture des sorties et du
fichier .run.json, tenue du registre SimulationRun et traduction des erreurs
en codes de sortie : 2 configuration, 3 numérique, 4 entrées/sorties.
"""
import logging
import math
from pathlib import Path

import numpy as np
from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from master import __version__
from master.exceptions import ConfigError, InvalidParameterError, NumericalError, OutputError, RotorError
from experiments.config_parser import config_to_dict, parse_config
from experiments.emitters import FORMATS, write_output, write_run_record
from experiments.models import SimulationRun

logger = logging.getLogger(__name__)

EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_OUTPUT = 4


def exit_code(error):
    if isinstance(error, (ConfigError, InvalidParameterError)):
        return EXIT_CONFIG
    if isinstance(error, NumericalError):
        return EXIT_NUMERICAL
    if isinstance(error, OutputError):
        return EXIT_OUTPUT
    return 1


def read_config_file(path):
    if not path:
        return ''
    try:
        return Path(path).read_text(encoding='utf-8')
    except OSError as error:
        raise OutputError(str(path), error.strerror or str(error))


def parse_kbar_range(text):
    """'LO:HI:STEP' -> LO, LO+STEP, ... ≤ HI"""
    try:
        lo, hi, step = (float(part) for part in text.split(':'))
    except ValueError:
        raise ConfigError('kbar-range', f"format attendu LO:HI:STEP (reçu '{text}')")
    if not step > 0 or hi < lo:
        raise ConfigError('kbar-range', f"plage vide ou pas non positif ({text})")
    count = math.floor((hi - lo) / step + 1e-9) + 1
    return [float(v) for v in np.round(lo + step * np.arange(count), 12)]


class SimulationCommand(BaseCommand):
    """Commande enregistrée dans le registre, erreurs converties en codes de sortie"""
    command_name = ''
    sweeping = False

    def add_arguments(self, parser):
        parser.add_argument(
            '--config',
            help='Fichier de configuration (key=value ou YAML)'
        )
        parser.add_argument(
            '--set',
            action='append',
            dest='overrides',
            default=[],
            metavar='KEY=VALUE',
            help='Surcharge une clé de configuration (répétable)'
        )
        self.add_output_arguments(parser)

    def add_output_arguments(self, parser):
        parser.add_argument(
            '--out',
            required=True,
            help='Fichier de sortie'
        )
        parser.add_argument(
            '--format',
            choices=FORMATS,
            default='csv',
            help='Format de sortie (défaut : csv)'
        )
        parser.add_argument(
            '--workers',
            type=int,
            default=settings.ROTOR_WORKERS,
            help='Nombre de processus joblib (défaut : ROTOR_WORKERS)'
        )

    def load_config(self, options):
        text = read_config_file(options.get('config'))
        cfg = parse_config(text, options.get('overrides'), sweeping=self.sweeping)
        self.register(config_to_dict(cfg), cfg.master_seed)
        return cfg

    def register(self, config, seed):
        self.record.config = config
        self.record.seed = seed
        self.record.save(update_fields=['config', 'seed'])

    def write_result(self, path, payload, config, extra=None):
        write_output(path, payload)
        write_run_record(path, self.command_name, config, dict(extra or {}, version=__version__))
        self.stdout.write(self.style.SUCCESS(f'[OK] {path}'))

    def handle(self, *args, **options):
        self.progress = settings.ROTOR_PROGRESS and options['verbosity'] > 0
        if options['workers'] < 1:
            raise CommandError('--workers doit être ≥ 1', returncode=EXIT_CONFIG)
        self.record = SimulationRun.objects.create(
            command=self.command_name,
            output_path=options.get('out') or '',
            output_format=options.get('format') or '',
            code_version=__version__,
        )
        try:
            self.perform(options)
        except RotorError as error:
            self.record.finish('failed', str(error))
            logger.error(f"{self.command_name} : {error}")
            raise CommandError(str(error), returncode=exit_code(error))
        except Exception as error:
            self.record.finish('failed', repr(error))
            raise
        self.record.finish('success')
        self.stdout.write(self.style.SUCCESS(
            f'=== {self.command_name} terminé en {self.record.duration.total_seconds():.1f}s ==='
        ))

    def perform(self, options):
        raise NotImplementedError


class KbarGridMixin:
    """Options --kbar-range / --kbar des commandes à plusieurs valeurs de kbar"""
    sweeping = True

    def add_kbar_arguments(self, parser):
        parser.add_argument(
            '--kbar-range',
            metavar='LO:HI:STEP',
            help='Grille régulière de kbar'
        )
        parser.add_argument(
            '--kbar',
            action='append',
            type=float,
            dest='kbar_values',
            help='Valeur de kbar explicite (répétable, alternative à --kbar-range)'
        )

    def kbar_values(self, options):
        if options['kbar_range'] and options['kbar_values']:
            raise ConfigError('kbar-range', "--kbar-range et --kbar sont exclusifs")
        if options['kbar_range']:
            return parse_kbar_range(options['kbar_range'])
        if options['kbar_values']:
            return options['kbar_values']
        raise ConfigError('kbar-range', "--kbar-range ou --kbar obligatoire")
