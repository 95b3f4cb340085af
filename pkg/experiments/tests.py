import io
import math
import tempfile
from pathlib import Path

import orjson
from django.conf import settings
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, TestCase, tag

from analytics.series import CurvePoint, DiffusionCurve, DiffusionEstimate, RateKind, rate_series
from ensemble.config import EnsembleConfig
from ensemble.services import run_ensemble
from master.exceptions import ConfigError, OutputError
from params.types import DimensionlessParams
from .config_parser import config_to_dict, parse_config
from .emitters import (
    CSV_COLUMNS, DINF_COLUMNS, emit_curve, emit_dinf_report, parse_curve_csv, parse_curve_json,
    sidecar_path, write_output,
)
from .management.base import parse_kbar_range
from .management.commands.reproduce_fig import panel_path
from .models import SimulationRun
from .recipes import ANALYTIC_COLUMNS, FIGURES, SWEEP_KBAR, Panel, panel_values, run_panel
from .services import DinfComparison, DinfReport, compare_dinf, discrepancy

SMALL_RUN = [
    'kappa=3', 'kbar=2', 'eta=0.2', 'seed=17', 'kicks=5', 'trajectories=20', 'groups=2', 'grid=128',
    'classical_particles=200', 'classical_substeps=8', 'initial_window=1:2', 'late_window=2:3',
]


def small_config(**overrides):
    values = {
        'params': DimensionlessParams(kappa=3.0, kbar=2.0, eta=0.2),
        'master_seed': 17,
        'n_kicks': 5,
        'n_trajectories': 20,
        'n_groups': 2,
        'grid_size': 128,
        'late_window': (2, 3),
    }
    values.update(overrides)
    return EnsembleConfig(**values)


def sample_curve():
    return DiffusionCurve((
        CurvePoint(1.5, RateKind.INITIAL, DiffusionEstimate(23.125, 0.75, (2, 5)), 20.1),
        CurvePoint(3.0, RateKind.INITIAL, DiffusionEstimate(31.0 / 3.0, 1.0 / 7.0, (2, 5)), None),
    ), {'kappa': 9.0, 'eta': 0.1, 'alpha': 0.005, 'n_trajectories': 400, 'seed': 3, 'recoil': 'uniform'})


def csv_lines(payload):
    return payload.decode('utf-8').strip().split('\n')


class SettingsTests(SimpleTestCase):
    """Projet sans vues : seuls le registre et l'admin sont configurés"""

    def test_no_web_serving_settings(self):
        self.assertIsNone(settings.STATIC_ROOT)
        self.assertFalse(hasattr(settings, 'REST_FRAMEWORK'))
        self.assertEqual(settings.ROTOR_CONFIG['KICKS'], 61)


class ParseConfigTests(SimpleTestCase):

    def test_minimal_tokens(self):
        cfg = parse_config("kappa=9 kbar=2 eta=0.1 seed=1")
        self.assertEqual(cfg.params.kappa, 9.0)
        self.assertEqual(cfg.params.kbar, 2.0)
        self.assertEqual(cfg.params.eta, 0.1)
        self.assertEqual(cfg.params.alpha, 0.005)
        self.assertEqual(cfg.n_trajectories, 1000)
        self.assertEqual(cfg.n_groups, 10)
        self.assertEqual(cfg.grid_size, 4096)
        self.assertEqual(cfg.n_kicks, 61)
        self.assertIsNone(cfg.substeps)
        self.assertEqual(cfg.master_seed, 1)

    def test_eta_out_of_range(self):
        with self.assertRaises(ConfigError) as raised:
            parse_config("kappa=9 kbar=2 eta=1.5 seed=1")
        self.assertEqual(raised.exception.key, 'eta')

    def test_unknown_key(self):
        with self.assertRaises(ConfigError) as raised:
            parse_config("kappa=9 kbar=2 seed=1 colour=red")
        self.assertEqual(raised.exception.key, 'colour')

    def test_required_keys(self):
        for text, key in (("kbar=2 seed=1", 'kappa'), ("kappa=9 kbar=2", 'seed'), ("kappa=9 seed=1", 'kbar')):
            with self.subTest(text=text), self.assertRaises(ConfigError) as raised:
                parse_config(text)
            self.assertEqual(raised.exception.key, key)

    def test_kbar_optional_when_sweeping(self):
        cfg = parse_config("kappa=9 seed=1", sweeping=True)
        self.assertEqual(cfg.params.kappa, 9.0)

    def test_malformed_token(self):
        with self.assertRaises(ConfigError):
            parse_config("kappa 9 kbar=2 seed=1")

    def test_comments_and_overrides(self):
        text = "kappa=9   # commentaire\nkbar=2\nseed=1\neta=0.05\n"
        cfg = parse_config(text, overrides=['eta=0.2', 'kbar=3'])
        self.assertEqual(cfg.params.eta, 0.2)
        self.assertEqual(cfg.params.kbar, 3.0)

    def test_yaml_document(self):
        text = "kappa: 9\nkbar: 2.5\nseed: 4\ninitial_window: [1, 4]\nsubsteps: 80\nrecoil: uniform\n"
        cfg = parse_config(text)
        self.assertEqual(cfg.initial_window, (1, 4))
        self.assertEqual(cfg.substeps, 80)
        self.assertEqual(cfg.recoil.value, 'uniform')

    def test_structural_errors_name_the_key(self):
        cases = {
            'trajectories': "trajectories=15 groups=10",
            'grid': "grid=1000",
            'substeps': "substeps=often",
            'initial_window': "initial_window=5:2",
            'alpha': "alpha=1.5",
        }
        for key, extra in cases.items():
            with self.subTest(key=key), self.assertRaises(ConfigError) as raised:
                parse_config(f"kappa=9 kbar=2 seed=1 {extra}")
            self.assertEqual(raised.exception.key, key)

    def test_config_dict_is_reparseable(self):
        cfg = parse_config("kappa=9 kbar=2 eta=0.1 seed=1 initial_window=1:3 substeps=60 classical_noise=false")
        tokens = [f"{key}={value}" for key, value in config_to_dict(cfg).items()]
        self.assertEqual(parse_config(' '.join(tokens)), cfg)


class EmitterTests(SimpleTestCase):

    def test_empty_curve_is_header_only(self):
        self.assertEqual(emit_curve(DiffusionCurve(), 'csv'), (','.join(CSV_COLUMNS) + '\n').encode())

    def test_column_order(self):
        header, row = csv_lines(emit_curve(DiffusionCurve(sample_curve().points[:1], sample_curve().metadata)))
        self.assertEqual(header.split(','), CSV_COLUMNS)
        self.assertLess(CSV_COLUMNS.index('kbar'), CSV_COLUMNS.index('D'))
        self.assertEqual(row.split(',')[:8], ['1.5', '9.0', '0.1', '0.005', 'initial_window', '2', '5', '23.125'])

    def test_json_round_trip(self):
        curve = sample_curve()
        self.assertEqual(parse_curve_json(emit_curve(curve, 'json')), curve)

    def test_json_carries_metadata(self):
        payload = orjson.loads(emit_curve(sample_curve(), 'json'))
        self.assertEqual(payload['metadata']['recoil'], 'uniform')
        self.assertEqual(list(payload['points'][0]), CSV_COLUMNS)

    def test_csv_read_back(self):
        curve = sample_curve()
        parsed = parse_curve_csv(emit_curve(curve, 'csv'), curve.metadata)
        self.assertEqual(len(parsed), 2)
        self.assertIsNone(parsed.points[1].classical_reference)
        self.assertAlmostEqual(parsed.points[1].estimate.value, 31.0 / 3.0, places=12)
        self.assertEqual(parsed.points[0].estimate.kick_range, (2, 5))

    def test_decimal_point_without_thousands_separator(self):
        point = CurvePoint(2.0, RateKind.LATE, DiffusionEstimate(12345.5, 0.5, (30, 60)))
        self.assertIn(',12345.5,', csv_lines(emit_curve(DiffusionCurve((point,))))[1])

    def test_unknown_format(self):
        with self.assertRaises(ConfigError) as raised:
            emit_curve(sample_curve(), 'xml')
        self.assertEqual(raised.exception.key, 'format')

    def test_dinf_report_columns(self):
        row = DinfComparison(3.0, 10.0, 0.1, 12.0, 0.5, 11.5, 0.4, 0.78, 11.9, True, 200, 5)
        header, line = csv_lines(emit_dinf_report(DinfReport((row,), {'seed': 5})))
        self.assertEqual(header.split(','), DINF_COLUMNS)
        self.assertIn('True', line.split(','))

    def test_write_output_reports_path(self):
        with tempfile.TemporaryDirectory() as directory:
            blocker = Path(directory) / 'blocker'
            blocker.write_text('x')
            with self.assertRaises(OutputError) as raised:
                write_output(blocker / 'curve.csv', b'kbar\n')
            self.assertIn('blocker', raised.exception.path)

    def test_sidecar_path(self):
        self.assertEqual(sidecar_path('out/curve.csv'), Path('out/curve.csv.run.json'))


class CompareDinfTests(SimpleTestCase):

    def test_requires_decoherence(self):
        with self.assertRaises(ConfigError) as raised:
            compare_dinf(small_config(params=DimensionlessParams(kappa=3.0, kbar=2.0, eta=0.0)), [2.0])
        self.assertEqual(raised.exception.key, 'eta')

    def test_late_window_must_fit(self):
        with self.assertRaises(ConfigError) as raised:
            compare_dinf(small_config(late_window=(30, 60)), [2.0])
        self.assertEqual(raised.exception.key, RateKind.LATE)

    def test_eta_one_reduces_to_first_kick(self):
        cfg = small_config(params=DimensionlessParams(kappa=3.0, kbar=2.0, eta=1.0))
        row = compare_dinf(cfg, [2.0]).rows[0]
        coherent = run_ensemble(cfg.with_params(eta=0.0))
        self.assertAlmostEqual(row.D_inf_weighted, rate_series(coherent)[0], places=12)
        self.assertAlmostEqual(row.D_inf_model, 3.0 ** 2 / 4, places=12)
        self.assertTrue(row.model_based)

    def test_report(self):
        report = compare_dinf(small_config(), [1.0, 2.0])
        self.assertEqual([row.kbar for row in report.rows], [1.0, 2.0])
        self.assertIn('model_note', report.metadata)
        for row in report.rows:
            self.assertEqual(row.seed, 17)
            self.assertEqual(row.n_trajectories, 20)
            self.assertGreaterEqual(row.D_inf_weighted_stderr, 0.0)
            expected = discrepancy(
                row.D_inf_simulated, row.D_inf_simulated_stderr, row.D_inf_weighted, row.D_inf_weighted_stderr
            )
            self.assertEqual(row.discrepancy_sigma, expected)

    def test_discrepancy_undefined_without_errors(self):
        self.assertIsNone(discrepancy(1.0, 0.0, 2.0, 0.0))
        self.assertAlmostEqual(discrepancy(5.0, 3.0, 1.0, 4.0), 0.8)


class RecipeTests(SimpleTestCase):

    def test_baked_parameters(self):
        self.assertEqual(sorted(FIGURES), [1, 2, 3, 4])
        quantum = FIGURES[1].panels[0].values
        self.assertEqual((quantum['kappa'], quantum['eta'], quantum['alpha']), (9, 0.1, 0.005))
        self.assertEqual(sorted(p.values['eta'] for p in FIGURES[3].panels), [0.02, 0.05, 0.1])
        self.assertEqual(FIGURES[4].panels[0].kbar_values, (2.0, 6.0, 6.28, 6.4))
        self.assertEqual(FIGURES[4].panels[0].values['eta'], 0.0)

    def test_recipe_parameters_win(self):
        values = panel_values(FIGURES[1].panels[0], {'kappa': 1, 'trajectories': 40, 'seed': 2})
        self.assertEqual(values['kappa'], 9)
        self.assertEqual(values['trajectories'], 40)

    def test_analytic_table(self):
        output = run_panel(FIGURES[2].panels[-1], {'trajectories': 10, 'seed': 1})
        lines = csv_lines(output.payload)
        self.assertEqual(lines[0].split(','), ANALYTIC_COLUMNS)
        self.assertEqual(len(lines) - 1, 3 * len(SWEEP_KBAR))

    def test_small_panels(self):
        knobs = {item.split('=')[0]: item.split('=')[1] for item in SMALL_RUN}
        sweep = run_panel(Panel('s', {'kappa': 3, 'eta': 0.2}, (1.0, 2.0)), knobs)
        self.assertEqual(len(csv_lines(sweep.payload)), 3)
        self.assertEqual(sweep.config['kappa'], 3.0)
        dinf = run_panel(Panel('d', {'kappa': 3, 'eta': 0.2}, (2.0,), kind='dinf'), knobs)
        self.assertEqual(csv_lines(dinf.payload)[0].split(','), DINF_COLUMNS)

    def test_panel_path(self):
        self.assertEqual(panel_path('figs/fig2.csv', 'kappa6', 4), Path('figs/fig2_kappa6.csv'))
        self.assertEqual(panel_path('figs/fig4.csv', 'coherent', 1), Path('figs/fig4.csv'))


class KbarRangeTests(SimpleTestCase):

    def test_regular_grid(self):
        self.assertEqual(parse_kbar_range('1:2:0.5'), [1.0, 1.5, 2.0])
        self.assertEqual(parse_kbar_range('0.5:1:0.1'), [0.5, 0.6, 0.7, 0.8, 0.9, 1.0])

    def test_invalid(self):
        for text in ('1:2', '1:2:0', '3:2:0.5', 'a:b:c'):
            with self.subTest(text=text), self.assertRaises(ConfigError):
                parse_kbar_range(text)


class CommandTests(TestCase):

    def setUp(self):
        self.directory = tempfile.TemporaryDirectory()
        self.root = Path(self.directory.name)

    def tearDown(self):
        self.directory.cleanup()

    def call(self, name, *args, **options):
        options.setdefault('verbosity', 0)
        options.setdefault('stdout', io.StringIO())
        return call_command(name, *args, **options)

    def test_run_writes_curve_sidecar_and_registry(self):
        out = self.root / 'run.csv'
        self.call('run', overrides=SMALL_RUN, out=str(out))

        lines = csv_lines(out.read_bytes())
        self.assertEqual(lines[0].split(','), CSV_COLUMNS)
        self.assertEqual(len(lines) - 1, 5 + 1)
        record = orjson.loads(sidecar_path(out).read_bytes())
        self.assertEqual(record['command'], 'run')
        self.assertEqual(record['config']['seed'], 17)

        run = SimulationRun.objects.get()
        self.assertEqual(run.status, 'success')
        self.assertEqual(int(run.seed), 17)
        self.assertEqual(run.config['kappa'], 3.0)
        self.assertIsNotNone(run.duration)

    def test_run_reproduces_from_recorded_config(self):
        first, second = self.root / 'a.csv', self.root / 'b.csv'
        self.call('run', overrides=SMALL_RUN, out=str(first), no_classical=True)
        recorded = SimulationRun.objects.get().config
        config_file = self.root / 'recorded.cfg'
        config_file.write_text('\n'.join(f'{key}={value}' for key, value in recorded.items()))
        self.call('run', config=str(config_file), out=str(second), no_classical=True)
        self.assertEqual(first.read_bytes(), second.read_bytes())

    def test_run_histogram(self):
        histogram = self.root / 'final.csv'
        self.call('run', overrides=SMALL_RUN, out=str(self.root / 'run.json'), format='json',
                  histogram=str(histogram), no_classical=True)
        lines = csv_lines(histogram.read_bytes())
        self.assertEqual(lines[0], 'rho,probability')
        total = sum(float(line.split(',')[1]) for line in lines[1:])
        self.assertAlmostEqual(total, 1.0, places=10)

    def test_config_error_exit_code(self):
        with self.assertRaises(CommandError) as raised:
            self.call('run', overrides=SMALL_RUN + ['eta=1.5'], out=str(self.root / 'run.csv'))
        self.assertEqual(raised.exception.returncode, 2)
        run = SimulationRun.objects.get()
        self.assertEqual(run.status, 'failed')
        self.assertIn('eta', run.error_message)

    def test_missing_config_file_exit_code(self):
        with self.assertRaises(CommandError) as raised:
            self.call('run', config=str(self.root / 'absent.cfg'), out=str(self.root / 'run.csv'))
        self.assertEqual(raised.exception.returncode, 4)

    def test_output_error_exit_code(self):
        blocker = self.root / 'blocker'
        blocker.write_text('x')
        with self.assertRaises(CommandError) as raised:
            self.call('run', overrides=SMALL_RUN, out=str(blocker / 'run.csv'), no_classical=True)
        self.assertEqual(raised.exception.returncode, 4)

    def test_grid_overflow_exit_code(self):
        overrides = SMALL_RUN + ['kappa=30', 'kbar=0.5', 'sigma_rho_over_kbar=0', 'grid=32',
                                 'trajectories=2', 'groups=1']
        with self.assertRaises(CommandError) as raised:
            self.call('run', overrides=overrides, out=str(self.root / 'run.csv'))
        self.assertEqual(raised.exception.returncode, 3)
        self.assertIn('trajectoire 0', SimulationRun.objects.get().error_message)

    def test_sweep(self):
        out = self.root / 'sweep.csv'
        self.call('sweep', overrides=SMALL_RUN, out=str(out), kbar_range='1:2:0.5', no_classical=True)
        lines = csv_lines(out.read_bytes())
        self.assertEqual([float(line.split(',')[0]) for line in lines[1:]], [1.0, 1.5, 2.0])
        self.assertEqual(lines[1].split(',')[CSV_COLUMNS.index('classical_D')], '')
        self.assertEqual(orjson.loads(sidecar_path(out).read_bytes())['kbar_values'], [1.0, 1.5, 2.0])

    def test_sweep_needs_kbar_values(self):
        with self.assertRaises(CommandError) as raised:
            self.call('sweep', overrides=SMALL_RUN, out=str(self.root / 'sweep.csv'))
        self.assertEqual(raised.exception.returncode, 2)

    def test_sweep_identical_across_workers(self):
        outputs = []
        for workers in (1, 2):
            out = self.root / f'sweep{workers}.csv'
            self.call('sweep', overrides=SMALL_RUN + ['trajectories=60'], out=str(out), kbar_values=[1.0, 2.0],
                      workers=workers)
            outputs.append(out.read_bytes())
        self.assertEqual(outputs[0], outputs[1])

    def test_compare_dinf(self):
        out = self.root / 'dinf.csv'
        self.call('compare_dinf', overrides=SMALL_RUN, out=str(out), kbar_values=[2.0])
        lines = csv_lines(out.read_bytes())
        self.assertEqual(lines[0].split(','), DINF_COLUMNS)
        self.assertEqual(len(lines), 2)
        self.assertEqual(SimulationRun.objects.get().command, 'compare_dinf')

    def test_compare_dinf_rejects_coherent_config(self):
        with self.assertRaises(CommandError) as raised:
            self.call('compare_dinf', overrides=SMALL_RUN + ['eta=0'], out=str(self.root / 'd.csv'), kbar_values=[2.0])
        self.assertEqual(raised.exception.returncode, 2)

    def test_reproduce_fig_rejects_uneven_groups(self):
        with self.assertRaises(CommandError) as raised:
            self.call('reproduce_fig', '4', trajectories=15, out=str(self.root / 'fig4.csv'))
        self.assertEqual(raised.exception.returncode, 2)
        self.assertEqual(SimulationRun.objects.get().config['figure'], 4)


@tag('acceptance')
class DeterminismAcceptanceTests(TestCase):

    def test_byte_identical_with_eight_workers(self):
        with tempfile.TemporaryDirectory() as directory:
            outputs = []
            for workers in (1, 8):
                out = Path(directory) / f'curve{workers}.csv'
                call_command(
                    'sweep', overrides=['kappa=9', 'eta=0.1', 'seed=11', 'kicks=6', 'trajectories=200', 'grid=512'],
                    out=str(out), kbar_values=[2.0, 3.0], workers=workers, verbosity=0, stdout=io.StringIO(),
                )
                outputs.append(out.read_bytes())
        self.assertEqual(outputs[0], outputs[1])


@tag('acceptance')
class LateTimeConsistencyAcceptanceTests(SimpleTestCase):

    def test_simulated_dinf_matches_weighted_sum(self):
        cfg = EnsembleConfig(
            DimensionlessParams(kappa=10.0, kbar=2.0, eta=0.1), master_seed=2024,
            n_kicks=61, n_trajectories=200, grid_size=1024,
        )
        report = compare_dinf(cfg, [2.0, 3.0, 5.0], workers=2)
        for row in report.rows:
            with self.subTest(kbar=row.kbar):
                self.assertLess(abs(row.discrepancy_sigma), 3.0)
                self.assertTrue(math.isfinite(row.D_inf_model))
        kbar3 = next(row for row in report.rows if row.kbar == 3.0)
        self.assertLess(abs(kbar3.D_inf_model / kbar3.D_inf_weighted - 1.0), 0.3)
