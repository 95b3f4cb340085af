from analytics.series import DiffusionCurve, RateKind
from ensemble.services import curve_metadata, reference_series, run_ensemble, series_points
from experiments.emitters import emit_curve, emit_histogram
from experiments.management.base import SimulationCommand


class Command(SimulationCommand):
    help = "Simule un ensemble unique et écrit D(n) par kick et les moyennes par fenêtre"
    command_name = 'run'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument(
            '--rate',
            action='append',
            dest='rates',
            choices=RateKind.CHOICES,
            help='Fenêtre à émettre (répétable ; défaut : per_kick et initial_window)'
        )
        parser.add_argument(
            '--histogram',
            metavar='PATH',
            help='Écrit aussi la distribution finale d\'impulsion moyennée (CSV)'
        )
        parser.add_argument(
            '--no-classical',
            action='store_true',
            help='Ne pas calculer la référence classique'
        )

    def perform(self, options):
        cfg = self.load_config(options)
        rates = tuple(options['rates'] or (RateKind.PER_KICK, RateKind.INITIAL))
        self.stdout.write(
            f'[RUN] κ={cfg.params.kappa} kbar={cfg.params.kbar} η={cfg.params.eta}, '
            f'{cfg.n_trajectories} trajectoires, graine {cfg.master_seed}'
        )

        series = run_ensemble(
            cfg, workers=options['workers'], progress=self.progress, histogram=bool(options['histogram'])
        )
        reference = None if options['no_classical'] else reference_series(cfg, series, options['workers'])
        points = series_points(cfg, series, rates, reference)
        curve = DiffusionCurve(
            tuple(point for rate_kind in rates for point in points[rate_kind]), curve_metadata(cfg)
        )
        self.write_result(options['out'], emit_curve(curve, options['format']), self.record.config)

        if options['histogram']:
            self.write_result(options['histogram'], emit_histogram(series.final_distribution), self.record.config)
