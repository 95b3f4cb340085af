from pathlib import Path

from experiments.management.base import SimulationCommand
from experiments.recipes import FIGURES, run_recipe


def panel_path(out, suffix, n_panels):
    """Une figure à un panneau écrit --out tel quel, sinon <nom>_<panneau><ext>"""
    out = Path(out)
    if n_panels == 1:
        return out
    return out.with_name(f'{out.stem}_{suffix}{out.suffix}')


class Command(SimulationCommand):
    help = "Reproduit une figure avec ses paramètres figés ; seule la taille d'ensemble est libre"
    command_name = 'reproduce_fig'

    def add_arguments(self, parser):
        parser.add_argument(
            'figure',
            type=int,
            choices=sorted(FIGURES),
            help='Numéro de figure'
        )
        parser.add_argument(
            '--trajectories',
            type=int,
            default=1000,
            help="Taille d'ensemble (multiple de 10, défaut : 1000)"
        )
        parser.add_argument(
            '--seed',
            type=int,
            default=1,
            help='Graine maîtresse (défaut : 1)'
        )
        self.add_output_arguments(parser)

    def perform(self, options):
        recipe = FIGURES[options['figure']]
        self.register({'figure': recipe.number, 'trajectories': options['trajectories']}, options['seed'])
        self.stdout.write(f'[FIG {recipe.number}] {recipe.description}')

        outputs = run_recipe(
            recipe, options['trajectories'], options['seed'], options['format'],
            workers=options['workers'], progress=self.progress,
        )
        for output in outputs:
            path = panel_path(options['out'], output.suffix, len(outputs))
            self.write_result(path, output.payload, output.config, {
                'figure': recipe.number,
                'panel': output.suffix,
            })
