import numpy as np
from django.test import SimpleTestCase, tag

from analytics.formulas import classical_rate, quasilinear_rate, recoil_heating
from analytics.series import averaged_rate, diffusion_rate, jump_rate, rate_series
from ensemble.seeding import CLASSICAL_STREAM, stream_rng
from master.exceptions import InvalidParameterError
from params.types import DimensionlessParams
from .dynamics import ClassicalKick, ClassicalState, classical_ensemble, classical_kick, leapfrog_pulse, standard_map_step


def angle_difference(a, b):
    return np.abs(np.angle(np.exp(1j * (a - b))))


class ClassicalKickTests(SimpleTestCase):

    def setUp(self):
        rng = np.random.default_rng(11)
        self.state = ClassicalState(rng.uniform(0, 2 * np.pi, 200), rng.normal(0.0, 3.0, 200))

    def test_phi_wrapped(self):
        state = ClassicalState([-0.5, 7.0, 2 * np.pi], [0.0, 0.0, 0.0])
        self.assertTrue(np.all((state.phi >= 0) & (state.phi < 2 * np.pi)))
        self.assertAlmostEqual(state.phi[0], 2 * np.pi - 0.5)

    def test_free_rotation(self):
        params = DimensionlessParams(kappa=0.0, kbar=1.0, alpha=0.3)
        kicked = classical_kick(self.state, params, np.random.default_rng(0), substeps=8)
        np.testing.assert_array_equal(kicked.rho, self.state.rho)
        self.assertLess(angle_difference(kicked.phi, self.state.phi + self.state.rho).max(), 1e-12)

    def test_impulse_limit_is_standard_map(self):
        kappa = 2.0
        params = DimensionlessParams(kappa=kappa, kbar=1.0, alpha=1e-7)
        kicked = classical_kick(self.state, params, np.random.default_rng(0), substeps=1)
        expected = standard_map_step(self.state, kappa)
        np.testing.assert_allclose(kicked.rho, expected.rho, atol=1e-5)
        self.assertLess(angle_difference(kicked.phi, expected.phi).max(), 1e-5)

    def test_time_reversal(self):
        kick_strength, dt, substeps = 9.0 / 0.005, 0.005 / 64, 64
        phi, rho = leapfrog_pulse(self.state.phi, self.state.rho, kick_strength, dt, substeps)
        back_phi, back_rho = leapfrog_pulse(phi, -rho, kick_strength, dt, substeps)
        np.testing.assert_allclose(back_phi, self.state.phi, atol=1e-9)
        np.testing.assert_allclose(-back_rho, self.state.rho, atol=1e-9)

    def test_noise_disabled_flag(self):
        params = DimensionlessParams(kappa=0.0, kbar=2.0, eta=1.0)
        kicked = classical_kick(self.state, params, np.random.default_rng(0), noise_enabled=False)
        np.testing.assert_array_equal(kicked.rho, self.state.rho)

    def test_recoil_kinematics(self):
        params = DimensionlessParams(kappa=0.0, kbar=2.0, eta=1.0)
        kicked = classical_kick(self.state, params, np.random.default_rng(0))
        shift = kicked.rho - self.state.rho
        # s = ±1, |u| ≤ 1 : Δρ ∈ [-kbar, kbar], jamais nul en moyenne quadratique
        self.assertTrue(np.all(np.abs(shift) <= 2.0 + 1e-12))
        self.assertAlmostEqual(np.mean(shift ** 2), 1.4, delta=0.3)

    def test_substeps_validation(self):
        params = DimensionlessParams(kappa=1.0, kbar=1.0)
        with self.assertRaises(InvalidParameterError):
            classical_kick(self.state, params, np.random.default_rng(0), substeps=0)

    def test_pulse_duration_from_profile(self):
        params = DimensionlessParams(kappa=3.0, kbar=1.0, alpha=0.2)
        kick = ClassicalKick(params, substeps=16, noise_enabled=False)
        self.assertAlmostEqual(kick.dt * 16, params.pulse.duration)
        free = classical_kick(self.state, params.with_changes(kappa=0.0), np.random.default_rng(0), substeps=16)
        self.assertLess(angle_difference(free.phi, self.state.phi + self.state.rho).max(), 1e-12)


class ClassicalEnsembleTests(SimpleTestCase):

    def test_first_kick_quasilinear(self):
        params = DimensionlessParams(kappa=9.0, kbar=1.0)
        series = classical_ensemble(params, 1, 10000, seed=5, noise_enabled=False)
        estimate = diffusion_rate(series, 0)
        expected = quasilinear_rate(9.0)
        self.assertLess(abs(estimate.value - expected), 3 * estimate.stderr + 0.01 * expected)

    def test_kappa_zero_gives_zero_rate(self):
        params = DimensionlessParams(kappa=0.0, kbar=1.5)
        series = classical_ensemble(params, 5, 100, seed=1, noise_enabled=False)
        np.testing.assert_array_equal(rate_series(series), np.zeros(5))

    def test_recoil_heating_without_kicks(self):
        params = DimensionlessParams(kappa=0.0, kbar=2.0, eta=0.1)
        series = classical_ensemble(params, 20, 10000, seed=2)
        estimate = averaged_rate(series, 0, 19)
        expected = recoil_heating(0.1, 2.0).rate
        self.assertLess(abs(estimate.value - expected), 3 * estimate.stderr + 0.005)
        mean_recoils, stderr = jump_rate(series)
        self.assertLess(abs(mean_recoils - 0.1), 3 * stderr + 0.002)

    def test_worker_count_invariance(self):
        params = DimensionlessParams(kappa=5.0, kbar=2.0, eta=0.2)
        serial = classical_ensemble(params, 4, 200, seed=9, workers=1)
        parallel = classical_ensemble(params, 4, 200, seed=9, workers=2)
        np.testing.assert_array_equal(serial.group_means, parallel.group_means)
        np.testing.assert_array_equal(serial.mean_rho_sq, parallel.mean_rho_sq)

    def test_initial_conditions(self):
        params = DimensionlessParams(kappa=0.0, kbar=0.5)
        series = classical_ensemble(params, 1, 20000, seed=3, noise_enabled=False, n_groups=10)
        self.assertAlmostEqual(series.mean_rho_sq[0], params.sigma_rho ** 2, delta=0.05 * params.sigma_rho ** 2)
        # Le premier groupe provient du flux (graine, famille classique, 0)
        rng = stream_rng(3, CLASSICAL_STREAM, 0)
        rng.uniform(0.0, 2 * np.pi, 2000)
        rho = rng.normal(0.0, params.sigma_rho, 2000)
        self.assertAlmostEqual(series.group_means[0, 0], np.mean(rho ** 2), places=10)

    def test_validation(self):
        params = DimensionlessParams(kappa=1.0, kbar=1.0)
        with self.assertRaises(InvalidParameterError):
            classical_ensemble(params, 5, 9, seed=0)
        with self.assertRaises(InvalidParameterError):
            classical_ensemble(params, 5, 100, seed=-1)


@tag('acceptance')
class ClassicalComparatorAcceptanceTests(SimpleTestCase):

    def test_early_window_and_recoil_heating(self):
        kbar = 4.0
        clean = classical_ensemble(DimensionlessParams(kappa=10.0, kbar=kbar), 2, 20000, seed=21, noise_enabled=False)
        early = averaged_rate(clean, 0, 1)
        self.assertLess(abs(early.value - 25.0), 2.5)

        noisy = classical_ensemble(
            DimensionlessParams(kappa=10.0, kbar=kbar, eta=0.1), 2, 20000, seed=21, noise_enabled=True
        )
        heated = averaged_rate(noisy, 0, 1)
        increment = heated.value - early.value
        combined = np.hypot(heated.stderr, early.stderr)
        self.assertLess(abs(increment - recoil_heating(0.1, kbar).rate), 3 * combined)

    def test_later_window_follows_correlated_rate(self):
        series = classical_ensemble(DimensionlessParams(kappa=10.0, kbar=1.0), 21, 20000, seed=22, noise_enabled=False)
        late = averaged_rate(series, 2, 20)
        expected = classical_rate(10.0)
        self.assertLess(abs(late.value - expected), 0.1 * expected + 3 * late.stderr)
