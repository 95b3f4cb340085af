from analytics.series import RateKind
from ensemble.services import sweep_kbar
from experiments.emitters import emit_curve
from experiments.management.base import KbarGridMixin, SimulationCommand


class Command(KbarGridMixin, SimulationCommand):
    help = "Balaye kbar à κ, η et α fixés et écrit la courbe de diffusion"
    command_name = 'sweep'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        self.add_kbar_arguments(parser)
        parser.add_argument(
            '--rate',
            action='append',
            dest='rates',
            choices=RateKind.CHOICES,
            help='Fenêtre à émettre (répétable ; défaut : initial_window)'
        )
        parser.add_argument(
            '--no-classical',
            action='store_true',
            help='Ne pas calculer les références classiques'
        )

    def perform(self, options):
        cfg = self.load_config(options)
        kbar_values = self.kbar_values(options)
        rates = tuple(options['rates'] or (RateKind.INITIAL,))
        self.stdout.write(f'[SWEEP] κ={cfg.params.kappa} η={cfg.params.eta} : {len(kbar_values)} valeurs de kbar')

        curve = sweep_kbar(
            cfg, kbar_values, rates,
            workers=options['workers'], progress=self.progress, classical_reference=not options['no_classical'],
        )
        self.write_result(options['out'], emit_curve(curve, options['format']), self.record.config, {
            'kbar_values': kbar_values,
            'rates': list(rates),
        })
