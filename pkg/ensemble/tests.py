import math

import numpy as np
from django.test import SimpleTestCase, tag
from scipy import stats

from analytics.formulas import d1_analytic, dq_shepelyansky
from analytics.series import RateKind, averaged_rate, diffusion_rate, jump_rate, rate_series
from master.exceptions import ConfigError, GridOverflowError, InvalidParameterError
from params.types import DimensionlessParams
from quantum.propagator import KickPropagator
from .config import EnsembleConfig, SimulationMode
from .seeding import stream_rng, trajectory_rng, validate_seed
from .services import run_ensemble, run_trajectory, sample_initial_momentum, sweep_kbar


def small_config(**overrides):
    values = {
        'params': DimensionlessParams(kappa=3.0, kbar=2.0, eta=0.2),
        'master_seed': 17,
        'n_kicks': 5,
        'n_trajectories': 20,
        'n_groups': 2,
        'grid_size': 128,
        'classical_particles': 200,
        'classical_substeps': 8,
        'initial_window': (1, 2),
    }
    values.update(overrides)
    return EnsembleConfig(**values)


def sign_changes(values):
    signs = np.sign(values)
    signs = signs[signs != 0]
    return int(np.count_nonzero(signs[1:] != signs[:-1]))


class SeedingTests(SimpleTestCase):

    def test_streams_are_independent_of_call_order(self):
        first = trajectory_rng(5, 3).random(4)
        trajectory_rng(5, 0).random(100)
        np.testing.assert_array_equal(trajectory_rng(5, 3).random(4), first)

    def test_families_differ(self):
        self.assertNotEqual(stream_rng(5, 0, 0).random(), stream_rng(5, 1, 0).random())

    def test_seed_validation(self):
        for seed in (-1, 2 ** 64, 1.5, True):
            with self.subTest(seed=seed), self.assertRaises(InvalidParameterError):
                validate_seed(seed)
        self.assertEqual(validate_seed(np.uint64(2 ** 63)), 2 ** 63)


class EnsembleConfigTests(SimpleTestCase):

    def test_defaults(self):
        cfg = EnsembleConfig(DimensionlessParams(kappa=9.0, kbar=2.0), master_seed=1)
        self.assertEqual(cfg.n_trajectories, 1000)
        self.assertEqual(cfg.n_groups, 10)
        self.assertEqual(cfg.group_size, 100)
        self.assertEqual(cfg.resolved_substeps, 150)
        self.assertIs(cfg.mode, SimulationMode.QUANTUM)

    def test_invariants(self):
        cases = {
            'trajectories': {'n_trajectories': 25, 'n_groups': 10},
            'kicks': {'n_kicks': 1},
            'grid': {'grid_size': 100},
            'substeps': {'substeps': 0},
            'late_window': {'late_window': (5, 2)},
            'seed': {'master_seed': -3},
        }
        for name, overrides in cases.items():
            with self.subTest(name=name):
                with self.assertRaises(InvalidParameterError) as raised:
                    small_config(**overrides)
                self.assertEqual(raised.exception.name, name)

    def test_with_params(self):
        cfg = small_config().with_params(kbar=3.5)
        self.assertEqual(cfg.params.kbar, 3.5)
        self.assertEqual(cfg.params.kappa, 3.0)


class InitialMomentumTests(SimpleTestCase):

    def test_variance_and_quasimomentum_spread(self):
        params = DimensionlessParams(kappa=1.0, kbar=1.3)
        rng = np.random.default_rng(8)
        draws = np.array([sample_initial_momentum(params, rng) for _ in range(100000)])
        expected = (4 * 1.3) ** 2
        self.assertLess(abs(draws.var() - expected), 3 * expected * math.sqrt(2.0 / draws.size))
        fractional = np.mod(draws / 1.3, 1.0)
        self.assertLess(stats.kstest(fractional, 'uniform').statistic, 0.01)

    def test_zero_width(self):
        params = DimensionlessParams(kappa=1.0, kbar=1.3, sigma_rho_over_kbar=0.0)
        rng = np.random.default_rng(0)
        self.assertEqual({sample_initial_momentum(params, rng) for _ in range(10)}, {0.0})


class RunEnsembleTests(SimpleTestCase):

    def test_shapes_and_grouping(self):
        cfg = small_config()
        series = run_ensemble(cfg)
        self.assertEqual(series.mean_rho_sq.shape, (6,))
        self.assertEqual(series.group_means.shape, (2, 6))
        self.assertEqual(series.jump_group_means.shape, (2, 5))
        np.testing.assert_allclose(series.group_means.mean(axis=0), series.mean_rho_sq, rtol=1e-12)

    def test_matches_single_trajectories(self):
        cfg = small_config(n_trajectories=4, n_groups=2)
        series = run_ensemble(cfg)
        propagator = KickPropagator(cfg.params, cfg.grid_size, cfg.resolved_substeps, cfg.recoil, cfg.leak_tolerance)
        rows = np.array([run_trajectory(cfg, i, propagator)[0] for i in range(4)])
        np.testing.assert_array_equal(series.group_means[1], rows[2:].mean(axis=0))

    def test_worker_count_invariance(self):
        cfg = small_config(n_trajectories=60, n_groups=3)
        serial = run_ensemble(cfg, workers=1)
        parallel = run_ensemble(cfg, workers=2)
        np.testing.assert_array_equal(serial.mean_rho_sq, parallel.mean_rho_sq)
        np.testing.assert_array_equal(serial.group_means, parallel.group_means)
        np.testing.assert_array_equal(serial.jump_group_means, parallel.jump_group_means)

    def test_overflow_names_trajectory_and_kick(self):
        params = DimensionlessParams(kappa=30.0, kbar=0.5, sigma_rho_over_kbar=0.0)
        cfg = small_config(params=params, grid_size=32, n_trajectories=2, n_groups=1)
        with self.assertRaises(GridOverflowError) as raised:
            run_ensemble(cfg)
        self.assertEqual(raised.exception.trajectory, 0)
        self.assertEqual(raised.exception.kick, 0)
        self.assertIn('trajectoire 0', str(raised.exception))

    def test_final_distribution(self):
        series = run_ensemble(small_config(), histogram=True)
        histogram = series.final_distribution
        self.assertAlmostEqual(histogram.probabilities.sum(), 1.0, places=10)
        second_moment = np.dot(histogram.probabilities, histogram.momenta ** 2)
        # Intervalles de largeur kbar : erreur de quantification ≤ kbar²/4 en moyenne
        self.assertAlmostEqual(second_moment, series.mean_rho_sq[-1], delta=0.25 * 2.0 ** 2 + 2.0 * math.sqrt(series.mean_rho_sq[-1]))

    def test_classical_mode(self):
        series = run_ensemble(small_config(mode='classical'))
        self.assertEqual(series.n_trajectories, 200)
        self.assertEqual(series.group_means.shape, (2, 6))


class SweepTests(SimpleTestCase):

    def test_empty_sweep(self):
        curve = sweep_kbar(small_config(), [])
        self.assertEqual(len(curve), 0)
        self.assertEqual(curve.metadata['seed'], 17)

    def test_kbar_validation(self):
        for values in ([0.4], [1.0, 13.0], [2.0, 1.0], [1.0, 1.0]):
            with self.subTest(values=values), self.assertRaises(InvalidParameterError):
                sweep_kbar(small_config(), values)

    def test_points_and_references(self):
        curve = sweep_kbar(small_config(), [1.0, 2.0], rates=(RateKind.INITIAL, RateKind.PER_KICK))
        self.assertEqual(curve.kbar_values(RateKind.INITIAL), [1.0, 2.0])
        self.assertEqual(len(curve.kbar_values(RateKind.PER_KICK)), 2 * 5)
        for point in curve.points:
            self.assertIsNotNone(point.classical_reference)
        self.assertEqual(curve.metadata['substeps'], 150)

    def test_window_longer_than_series(self):
        with self.assertRaises(ConfigError) as raised:
            sweep_kbar(small_config(), [1.0], rates=(RateKind.LATE,), classical_reference=False)
        self.assertEqual(raised.exception.key, RateKind.LATE)

    def test_unknown_rate_kind(self):
        with self.assertRaises(ConfigError):
            sweep_kbar(small_config(), [1.0], rates=('weekly',))


def quantum_config(kappa, kbar, eta, trajectories, kicks, grid=512, groups=10, seed=2024):
    return EnsembleConfig(
        DimensionlessParams(kappa=kappa, kbar=kbar, eta=eta), master_seed=seed,
        n_kicks=kicks, n_trajectories=trajectories, n_groups=groups, grid_size=grid,
    )


@tag('acceptance')
class QuantumEnsembleAcceptanceTests(SimpleTestCase):

    def test_quasilinear_first_kicks(self):
        for kbar in (1.0, 2.0, 4.0, 2 * math.pi):
            with self.subTest(kbar=kbar):
                series = run_ensemble(quantum_config(9.0, kbar, 0.1, 400, 2))
                first = diffusion_rate(series, 0)
                second = diffusion_rate(series, 1)
                self.assertLess(abs(first.value - 20.25), 3 * first.stderr)
                self.assertLess(abs(second.value - d1_analytic(9.0, kbar, 4 * kbar)), 3 * second.stderr)

    def test_mean_jumps_per_kick(self):
        series = run_ensemble(quantum_config(9.0, 2.0, 0.1, 200, 30, grid=1024, groups=20, seed=11))
        mean, stderr = jump_rate(series)
        self.assertLess(abs(mean - 0.1), 3 * stderr)

    def test_dynamical_localization(self):
        series = run_ensemble(quantum_config(9.0, 2.0, 0.0, 200, 61))
        late = averaged_rate(series, 40, 60)
        self.assertLess(late.value, 0.2 * dq_shepelyansky(9.0, 2.0))

    def test_stderr_scaling(self):
        small = run_ensemble(quantum_config(5.0, 2.0, 0.1, 160, 5, grid=256, groups=40))
        large = run_ensemble(quantum_config(5.0, 2.0, 0.1, 640, 5, grid=256, groups=40))
        ratio = averaged_rate(small, 0, 4).stderr / averaged_rate(large, 0, 4).stderr
        self.assertLess(abs(ratio - 2.0), 0.3 * 2.0)

    def test_oscillatory_settling_near_resonance(self):
        resonant = rate_series(run_ensemble(quantum_config(9.0, 6.28, 0.0, 200, 31)))[2:31]
        regular = rate_series(run_ensemble(quantum_config(9.0, 2.0, 0.0, 200, 31)))[2:31]
        self.assertGreaterEqual(sign_changes(resonant), 3)
        self.assertTrue(np.all(regular[:14] > 0))
        self.assertGreater(sign_changes(resonant), sign_changes(regular))


@tag('acceptance')
class InitialDiffusionSweepAcceptanceTests(SimpleTestCase):
    kbar_values = [1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 5.0]

    def initial_curve(self, kappa, kbar_values=None):
        cfg = quantum_config(kappa, 2.0, 0.1, 400, 6)
        return sweep_kbar(cfg, kbar_values or self.kbar_values, classical_reference=False)

    def test_enhanced_diffusion_peak(self):
        curve = self.initial_curve(9.0)
        values = curve.values(RateKind.INITIAL)
        stderrs = curve.stderrs(RateKind.INITIAL)
        peak = self.kbar_values[int(np.argmax(values))]
        self.assertTrue(2.5 <= peak <= 4.0)
        # Loin du sommet, temps de localisation long : D(2-5) suit la formule de Shepelyansky
        for i, kbar in enumerate(self.kbar_values[:2]):
            expected = dq_shepelyansky(9.0, kbar)
            self.assertLess(abs(values[i] - expected), max(3 * stderrs[i], 0.15 * expected))

    def test_quantum_resonance_peak(self):
        values = self.initial_curve(9.0, [5.8, 6.28, 6.8]).values(RateKind.INITIAL)
        self.assertEqual(int(np.argmax(values)), 1)

    def test_peak_shifts_with_kappa(self):
        weak = self.initial_curve(6.0).values(RateKind.INITIAL)
        strong = self.initial_curve(12.0).values(RateKind.INITIAL)
        self.assertGreaterEqual(np.argmax(strong), np.argmax(weak))
        self.assertGreater(strong.max(), weak.max())
