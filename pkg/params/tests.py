from fractions import Fraction

from django.test import SimpleTestCase

from master.exceptions import InvalidParameterError
from .conversion import effective_potential_strength, sublevel_weights, to_dimensionless
from .types import DimensionlessParams, PhysicalParams, PulseProfile


def physical(**overrides):
    values = dict(
        rabi_frequency_omega=1.0,
        delta45=1.0,
        delta44=1.0,
        delta43=1.0,
        pulse_period_T=1.0,
        pulse_length_tau_p=0.005,
        recoil_frequency_omega_r=0.125,
    )
    values.update(overrides)
    return PhysicalParams(**values)


class SublevelWeightsTests(SimpleTestCase):

    def test_exact_rationals(self):
        self.assertEqual(sublevel_weights(), (Fraction(11, 27), Fraction(7, 36), Fraction(7, 108)))

    def test_sum_is_two_thirds(self):
        self.assertEqual(sum(sublevel_weights()), Fraction(2, 3))

    def test_positive(self):
        self.assertTrue(all(w > 0 for w in sublevel_weights()))


class EffectivePotentialTests(SimpleTestCase):

    def test_unit_detunings(self):
        self.assertAlmostEqual(effective_potential_strength(physical()), 2 / 3, places=14)

    def test_zero_rabi(self):
        self.assertEqual(effective_potential_strength(physical(rabi_frequency_omega=0.0)), 0.0)

    def test_quadratic_in_rabi(self):
        base = effective_potential_strength(physical(rabi_frequency_omega=1.3))
        doubled = effective_potential_strength(physical(rabi_frequency_omega=2.6))
        self.assertAlmostEqual(doubled / base, 4.0, places=12)

    def test_zero_detuning_rejected(self):
        with self.assertRaises(InvalidParameterError):
            physical(delta44=0.0)


class ToDimensionlessTests(SimpleTestCase):

    def test_kbar_one(self):
        params = to_dimensionless(physical(recoil_frequency_omega_r=0.125, pulse_period_T=1.0), eta=0.1)
        self.assertAlmostEqual(params.kbar, 1.0, places=14)

    def test_alpha(self):
        params = to_dimensionless(physical(pulse_period_T=2e-5, pulse_length_tau_p=1e-7,
                                           recoil_frequency_omega_r=1e4), eta=0.0)
        self.assertAlmostEqual(params.alpha, 0.005, places=14)

    def test_k_alpha_is_kappa(self):
        params = to_dimensionless(physical(rabi_frequency_omega=3.7e3, delta45=2.1e3, delta44=2.3e3,
                                           delta43=2.5e3), eta=0.05)
        self.assertLess(abs(params.kick_strength * params.alpha - params.kappa), 1e-12 * params.kappa)

    def test_kappa_formula(self):
        p = physical(rabi_frequency_omega=2.0, pulse_period_T=3.0, pulse_length_tau_p=0.5,
                     recoil_frequency_omega_r=0.7)
        params = to_dimensionless(p, eta=0.0)
        expected = effective_potential_strength(p) * 0.7 * 3.0 * 0.5
        self.assertAlmostEqual(params.kappa, expected, places=12)

    def test_negative_kappa_rejected(self):
        with self.assertRaises(InvalidParameterError):
            to_dimensionless(physical(delta45=-1.0, delta44=-1.0, delta43=-1.0), eta=0.0)

    def test_result_satisfies_invariants(self):
        params = to_dimensionless(physical(), eta=1.0)
        self.assertEqual(params, params.with_changes())


class DimensionlessParamsTests(SimpleTestCase):

    def test_invariants(self):
        bad = [dict(kappa=-1.0), dict(kbar=0.0), dict(alpha=1.0), dict(alpha=0.0),
               dict(eta=1.5), dict(eta=-0.1), dict(sigma_rho_over_kbar=-1.0)]
        for overrides in bad:
            values = dict(kappa=9.0, kbar=2.0)
            values.update(overrides)
            with self.subTest(**overrides), self.assertRaises(InvalidParameterError) as ctx:
                DimensionlessParams(**values)
            self.assertEqual(ctx.exception.name, next(iter(overrides)))

    def test_square_pulse(self):
        pulse = PulseProfile(alpha=0.25)
        self.assertEqual(pulse.value(0.1), 1.0)
        self.assertEqual(pulse.value(0.3), 0.0)
        self.assertEqual(pulse.value(3.1), 1.0)
        self.assertEqual(pulse.duration, 0.25)
        self.assertEqual(pulse.flight_duration, 0.75)

    def test_pulse_follows_alpha(self):
        params = DimensionlessParams(kappa=9.0, kbar=2.0, alpha=0.01)
        self.assertEqual(params.pulse, PulseProfile(alpha=0.01))
        self.assertEqual(params.with_changes(alpha=0.02).pulse.duration, 0.02)
