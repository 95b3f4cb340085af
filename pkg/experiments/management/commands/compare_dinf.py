from experiments.emitters import emit_dinf_report
from experiments.management.base import KbarGridMixin, SimulationCommand
from experiments.services import compare_dinf


class Command(KbarGridMixin, SimulationCommand):
    help = "Compare le taux tardif simulé à la somme pondérée des D₀(n) d'un ensemble cohérent"
    command_name = 'compare_dinf'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        self.add_kbar_arguments(parser)

    def perform(self, options):
        cfg = self.load_config(options)
        kbar_values = self.kbar_values(options)
        self.stdout.write(
            f'[DINF] κ={cfg.params.kappa} η={cfg.params.eta} : {len(kbar_values)} valeurs de kbar, deux ensembles chacune'
        )

        report = compare_dinf(cfg, kbar_values, workers=options['workers'], progress=self.progress)
        for row in report.rows:
            if row.discrepancy_sigma is not None and abs(row.discrepancy_sigma) > 3.0:
                self.stdout.write(self.style.WARNING(
                    f'[WARN] kbar={row.kbar}: écart de {row.discrepancy_sigma:.1f} σ'
                ))
        self.write_result(options['out'], emit_dinf_report(report, options['format']), self.record.config, {
            'kbar_values': kbar_values,
        })
