import math

import numpy as np
from django.test import SimpleTestCase

from master.exceptions import InvalidParameterError
from quantum.recoil import RecoilDistribution
from .formulas import (
    bessel_j, break_time, classical_rate, d1_analytic, dinf_exponential_model, dinf_weighted,
    dinf_weights, dq_shepelyansky, quantum_kick_strength, quasilinear_rate, recoil_heating,
)
from .series import (
    CurvePoint, DiffusionCurve, DiffusionEstimate, KickSeries, RateKind, averaged_rate,
    diffusion_rate, jump_rate, rate_series,
)


def series_bessel(order, x, terms=80):
    """J_n(x) par sa série entière, indépendamment de scipy"""
    half = 0.5 * x
    return math.fsum(
        (-1) ** k * half ** (2 * k + order) / (math.factorial(k) * math.factorial(k + order))
        for k in range(terms)
    )


class DiffusionRateTests(SimpleTestCase):

    def test_simple_series(self):
        series = KickSeries.from_values([0.0, 2.0, 4.0])
        self.assertEqual(diffusion_rate(series, 0).value, 1.0)
        self.assertEqual(diffusion_rate(series, 1).value, 1.0)
        self.assertEqual(diffusion_rate(series, 1).stderr, 0.0)

    def test_constant_series(self):
        series = KickSeries.from_values([3.0] * 6)
        np.testing.assert_array_equal(rate_series(series), np.zeros(5))

    def test_out_of_range(self):
        series = KickSeries.from_values([0.0, 1.0, 2.0])
        for n in (-1, 2, 5):
            with self.subTest(n=n), self.assertRaises(InvalidParameterError):
                diffusion_rate(series, n)

    def test_window_equals_single_kick(self):
        series = KickSeries.from_values([0.0, 1.0, 5.0, 6.0, 10.0])
        self.assertEqual(averaged_rate(series, 2, 2), diffusion_rate(series, 2))

    def test_linear_series(self):
        series = KickSeries.from_values(2.0 * np.arange(20))
        for first, last in ((0, 0), (3, 10), (0, 18)):
            with self.subTest(window=(first, last)):
                self.assertAlmostEqual(averaged_rate(series, first, last).value, 1.0, places=12)

    def test_telescoping(self):
        rng = np.random.default_rng(4)
        values = np.cumsum(rng.random(30))
        series = KickSeries.from_values(values)
        total = sum(2.0 * diffusion_rate(series, n).value for n in range(4, 21))
        self.assertAlmostEqual(total, values[21] - values[4], places=12)

    def test_group_stderr(self):
        groups = np.array([[0.0, 2.0], [0.0, 4.0], [0.0, 6.0], [0.0, 8.0]])
        series = KickSeries(groups.mean(axis=0), groups, 40)
        estimate = diffusion_rate(series, 0)
        self.assertAlmostEqual(estimate.value, 2.5)
        per_group = np.array([1.0, 2.0, 3.0, 4.0])
        self.assertAlmostEqual(estimate.stderr, per_group.std(ddof=1) / 2.0)

    def test_negative_rates_are_not_clamped(self):
        series = KickSeries.from_values([4.0, 2.0])
        self.assertEqual(diffusion_rate(series, 0).value, -1.0)

    def test_negative_rho_sq_rejected(self):
        with self.assertRaises(InvalidParameterError):
            KickSeries.from_values([0.0, -1.0])

    def test_jump_rate(self):
        jumps = np.array([[0.1, 0.2], [0.3, 0.0]])
        series = KickSeries(np.zeros(3), np.zeros((2, 3)), 2, jump_group_means=jumps)
        mean, stderr = jump_rate(series)
        self.assertAlmostEqual(mean, 0.15)
        self.assertGreaterEqual(stderr, 0.0)
        with self.assertRaises(InvalidParameterError):
            jump_rate(KickSeries.from_values([0.0, 1.0]))


class DiffusionCurveTests(SimpleTestCase):

    def point(self, kbar, kind=RateKind.INITIAL, window=(2, 5)):
        return CurvePoint(kbar, kind, DiffusionEstimate(1.0, 0.1, window), 20.0)

    def test_strictly_increasing_per_kind(self):
        curve = DiffusionCurve((self.point(1.0), self.point(2.0), self.point(1.0, RateKind.LATE)))
        self.assertEqual(curve.kbar_values(RateKind.INITIAL), [1.0, 2.0])
        with self.assertRaises(InvalidParameterError):
            DiffusionCurve((self.point(2.0), self.point(2.0)))

    def test_per_kick_points_share_kbar(self):
        points = (
            self.point(1.0, RateKind.PER_KICK, (0, 0)),
            self.point(1.0, RateKind.PER_KICK, (1, 1)),
            self.point(2.0, RateKind.PER_KICK, (0, 0)),
        )
        self.assertEqual(len(DiffusionCurve(points)), 3)

    def test_estimate_invariants(self):
        with self.assertRaises(InvalidParameterError):
            DiffusionEstimate(1.0, -0.1, (0, 0))
        with self.assertRaises(InvalidParameterError):
            DiffusionEstimate(1.0, 0.1, (3, 2))


class BesselTests(SimpleTestCase):

    def test_values_at_zero(self):
        self.assertEqual(bessel_j(0, 0.0), 1.0)
        for order in (1, 2, 3):
            self.assertEqual(bessel_j(order, 0.0), 0.0)

    def test_first_zero_of_j0(self):
        self.assertGreater(bessel_j(0, 2.404825), 0.0)
        self.assertLess(bessel_j(0, 2.404827), 0.0)

    def test_small_argument(self):
        x = 1e-4
        self.assertLess(abs(bessel_j(1, x) - x / 2) / (x / 2), 1e-6)

    def test_matches_power_series(self):
        for order in range(4):
            for x in (-3.7, 0.5, 2.0, 7.5732, 10.0, 14.2):
                with self.subTest(order=order, x=x):
                    self.assertAlmostEqual(bessel_j(order, x), series_bessel(order, x), delta=1e-10)

    def test_domain(self):
        with self.assertRaises(InvalidParameterError):
            bessel_j(4, 1.0)
        with self.assertRaises(InvalidParameterError):
            bessel_j(0, 60.0)

    def test_vectorized(self):
        values = bessel_j(1, np.array([0.0, 1.0]))
        self.assertEqual(values.shape, (2,))


class D1AnalyticTests(SimpleTestCase):

    def test_large_width_limit(self):
        for kappa, kbar in ((9.0, 2.5), (9.0, 3.0), (12.0, 5.0)):
            with self.subTest(kappa=kappa, kbar=kbar):
                value = d1_analytic(kappa, kbar, 4.0 * kbar)
                self.assertLess(abs(value - quasilinear_rate(kappa)) / quasilinear_rate(kappa), 1e-10)

    def test_zero_width_at_resonance(self):
        kappa = 9.0
        self.assertAlmostEqual(d1_analytic(kappa, 2.0 * math.pi, 0.0), -0.25 * kappa ** 2, places=10)

    def test_kappa_zero(self):
        self.assertEqual(d1_analytic(0.0, 2.0, 1.0), 0.0)

    def test_kbar_must_be_positive(self):
        with self.assertRaises(InvalidParameterError):
            d1_analytic(9.0, 0.0, 1.0)


class ShepelyanskyTests(SimpleTestCase):

    def test_resonance_is_quasilinear(self):
        self.assertAlmostEqual(dq_shepelyansky(9.0, 2.0 * math.pi), 0.25 * 81.0, places=10)

    def test_against_series_oracle(self):
        kappa, kbar = 9.0, 2.0
        k_q = 2.0 * kappa * math.sin(kbar / 2) / kbar
        j1, j2, j3 = (series_bessel(order, k_q) for order in (1, 2, 3))
        expected = 0.5 * kappa ** 2 * (0.5 - j2 - j1 ** 2 + j2 ** 2 + j3 ** 2)
        self.assertAlmostEqual(dq_shepelyansky(kappa, kbar), expected, delta=1e-9)

    def test_single_interior_maximum(self):
        kbar = np.linspace(1.0, 5.0, 401)
        values = np.array([dq_shepelyansky(9.0, k) for k in kbar])
        peak = int(np.argmax(values))
        self.assertTrue(0 < peak < kbar.size - 1)
        self.assertTrue(2.0 < kbar[peak] < 3.5)

    def test_depends_only_on_effective_kick(self):
        self.assertAlmostEqual(quantum_kick_strength(9.0, 1e-12), 9.0, places=10)
        self.assertAlmostEqual(quantum_kick_strength(9.0, 2.0), 9.0 * math.sin(1.0), places=12)

    def test_classical_limit(self):
        self.assertAlmostEqual(classical_rate(10.0), 15.5862, places=3)


class DinfTests(SimpleTestCase):

    def test_eta_one(self):
        self.assertEqual(dinf_weighted(1.0, [7.0, 3.0, 1.0]), 7.0)

    def test_constant_series(self):
        self.assertAlmostEqual(dinf_weighted(0.13, [5.0] * 40), 5.0, places=12)

    def test_direct_expansion(self):
        eta, a, b = 0.2, 3.0, 1.5
        self.assertAlmostEqual(dinf_weighted(eta, [a, b] + [0.0] * 60), eta * a + eta * (1 - eta) * b, places=12)

    def test_weights_sum_to_one(self):
        for eta in (0.02, 0.1, 0.5, 1.0):
            with self.subTest(eta=eta):
                self.assertAlmostEqual(dinf_weights(eta, 60).sum(), 1.0, delta=1e-12)

    def test_invalid(self):
        with self.assertRaises(InvalidParameterError):
            dinf_weighted(0.1, [])
        with self.assertRaises(InvalidParameterError):
            dinf_weighted(0.0, [1.0])

    def test_exponential_model_eta_one(self):
        self.assertAlmostEqual(dinf_exponential_model(10.0, 3.0, 1.0), 25.0, places=12)

    def test_exponential_model_matches_weighted_sum(self):
        kappa, kbar, eta = 10.0, 3.0, 0.1
        d_q = dq_shepelyansky(kappa, kbar)
        n_b = break_time(kappa, kbar)
        n = np.arange(4000)
        d0 = np.where(n < 2, 0.25 * kappa ** 2, d_q * np.exp(-(n - 2.0) / n_b))
        self.assertAlmostEqual(dinf_exponential_model(kappa, kbar, eta), dinf_weighted(eta, d0), places=9)

    def test_exponential_model_long_break_time(self):
        kappa, eta = 10.0, 0.1
        kbar = 0.02
        d_q = dq_shepelyansky(kappa, kbar)
        limit = eta * kappa ** 2 / 4 * (2 - eta) + (1 - eta) ** 2 * d_q
        self.assertAlmostEqual(dinf_exponential_model(kappa, kbar, eta), limit, delta=1e-3 * limit)


class RecoilHeatingTests(SimpleTestCase):

    def test_dipole_perpendicular(self):
        heating = recoil_heating(0.1, 2.0)
        self.assertAlmostEqual(heating.rho_sq_per_kick, 0.1 * 1.4)
        self.assertAlmostEqual(heating.rate, 0.07)

    def test_uniform(self):
        heating = recoil_heating(1.0, 1.0, RecoilDistribution.UNIFORM)
        self.assertAlmostEqual(heating.rho_sq_per_kick, 0.25 * (4.0 / 3.0))

    def test_no_decoherence(self):
        self.assertEqual(recoil_heating(0.0, 3.0).rate, 0.0)
