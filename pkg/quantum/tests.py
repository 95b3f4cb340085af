import math

import numpy as np
from django.test import SimpleTestCase
from scipy.linalg import expm

from master.exceptions import GridOverflowError, InvalidParameterError
from params.types import DimensionlessParams
from .propagator import (
    JumpEvent, KickPropagator, apply_jump, default_substeps, edge_population, pulse_step,
)
from .recoil import RecoilDistribution, sample_recoil
from .state import QuantumState, free_evolution, measure_rho_sq, new_momentum_eigenstate


def dense_kick(state, params):
    """Oracle : exponentielle de matrice de H' sur la même échelle circulante, puis vol libre"""
    n = state.grid_size
    momenta = state.momenta(params.kbar)
    shift = np.roll(np.eye(n), 1, axis=0)
    cos_phi = 0.5 * (shift + shift.T)
    hamiltonian = np.diag(0.5 * momenta ** 2) - params.kick_strength * cos_phi
    pulse = expm(-1j * hamiltonian * params.alpha / params.kbar)
    free = np.exp(-1j * momenta ** 2 * (1.0 - params.alpha) / (2.0 * params.kbar))
    return free * (pulse @ state.amplitudes)


def superposition(weights, beta, grid_size=32):
    half = grid_size // 2
    amplitudes = np.zeros(grid_size, dtype=complex)
    for m, value in weights.items():
        amplitudes[m + half] = value
    amplitudes /= np.linalg.norm(amplitudes)
    return QuantumState(amplitudes, beta)


class MomentumEigenstateTests(SimpleTestCase):

    def test_zero_momentum(self):
        state = new_momentum_eigenstate(0.0, 2.0, 64)
        self.assertEqual(state.beta, 0.0)
        self.assertEqual(state.amplitudes[32], 1.0)

    def test_ladder_decomposition(self):
        state = new_momentum_eigenstate(1.5 * 2.0, 2.0, 64)
        self.assertAlmostEqual(state.beta, 0.5, places=12)
        self.assertEqual(np.flatnonzero(state.amplitudes).tolist(), [33])

    def test_rho_sq(self):
        state = new_momentum_eigenstate(-7.3, 1.7, 64)
        self.assertAlmostEqual(measure_rho_sq(state, 1.7), 7.3 ** 2, places=10)

    def test_out_of_range(self):
        with self.assertRaises(InvalidParameterError):
            new_momentum_eigenstate(100.0, 1.0, 64)

    def test_grid_size_power_of_two(self):
        for grid in (16, 48, 100):
            with self.subTest(grid=grid), self.assertRaises(InvalidParameterError):
                new_momentum_eigenstate(0.0, 1.0, grid)


class FreeEvolutionTests(SimpleTestCase):

    def test_zero_duration_is_identity(self):
        state = superposition({0: 1.0, 1: 1j, -3: 0.5}, 0.2)
        np.testing.assert_array_equal(free_evolution(state, 0.0, 1.3).amplitudes, state.amplitudes)

    def test_relative_phase(self):
        state = superposition({0: 1.0, 1: 1.0}, 0.0)
        evolved = free_evolution(state, 1.0, 2.0)
        ratio = evolved.amplitudes[17] / evolved.amplitudes[16]
        self.assertAlmostEqual(ratio, np.exp(-1j), places=12)

    def test_rho_sq_invariant(self):
        state = superposition({-2: 0.3, 0: 1.0, 5: 0.7j}, 0.37)
        before = measure_rho_sq(state, 2.5)
        after = measure_rho_sq(free_evolution(state, 3.7, 2.5), 2.5)
        self.assertAlmostEqual(before, after, places=10)

    def test_negative_duration(self):
        with self.assertRaises(InvalidParameterError):
            free_evolution(superposition({0: 1.0}, 0.0), -1.0, 1.0)

    def test_measure_superposition(self):
        state = superposition({-1: 1.0, 1: 1.0}, 0.0)
        self.assertAlmostEqual(measure_rho_sq(state, 3.0), 9.0, places=12)


class DenseOracleTests(SimpleTestCase):

    def test_one_kick_matches_matrix_exponential(self):
        rng = np.random.default_rng(0)
        for kappa in (1.0, 5.0, 9.0):
            for kbar in (1.0, 2.0 * math.pi):
                with self.subTest(kappa=kappa, kbar=kbar):
                    params = DimensionlessParams(kappa=kappa, kbar=kbar, alpha=0.005)
                    state = new_momentum_eigenstate(0.3 * kbar, kbar, 32)
                    propagator = KickPropagator(params, 32, leak_tolerance=1.0)
                    kicked, jumps = propagator.kick(state.copy(), rng)
                    expected = dense_kick(state, params)
                    self.assertEqual(jumps, [])
                    self.assertLess(np.max(np.abs(kicked.amplitudes - expected)), 1e-6)

    def test_kappa_zero_reduces_to_free_evolution(self):
        params = DimensionlessParams(kappa=0.0, kbar=1.3, alpha=0.1)
        state = superposition({0: 1.0, 2: 0.5j, -1: 0.25}, 0.4)
        evolved, _ = pulse_step(state, params, np.random.default_rng(1), substeps=7, leak_tolerance=1.0)
        expected = free_evolution(state, 0.1, 1.3)
        np.testing.assert_allclose(evolved.amplitudes, expected.amplitudes, atol=1e-12)

    def test_unitary_without_decoherence(self):
        params = DimensionlessParams(kappa=5.0, kbar=2.0)
        propagator = KickPropagator(params, 256)
        state = new_momentum_eigenstate(0.7, 2.0, 256)
        rng = np.random.default_rng(2)
        for n in range(10):
            state, _ = propagator.kick(state, rng, n)
            self.assertLess(abs(np.vdot(state.amplitudes, state.amplitudes).real - 1.0), 1e-10 * (n + 1))

    def test_substep_convergence(self):
        for kappa, kbar in ((9.0, 0.5), (9.0, 1.0), (9.0, 2.0), (12.0, 0.5)):
            with self.subTest(kappa=kappa, kbar=kbar):
                params = DimensionlessParams(kappa=kappa, kbar=kbar)
                results = []
                for substeps in (default_substeps(kappa), 2 * default_substeps(kappa)):
                    propagator = KickPropagator(params, 1024, substeps=substeps)
                    state = new_momentum_eigenstate(0.55 * kbar, kbar, 1024)
                    rng = np.random.default_rng(3)
                    for n in range(5):
                        state, _ = propagator.kick(state, rng, n)
                    results.append(measure_rho_sq(state, kbar))
                self.assertLess(abs(results[1] - results[0]) / results[0], 1e-6)

    def test_step_from_pulse_profile(self):
        params = DimensionlessParams(kappa=9.0, kbar=2.0, alpha=0.02)
        propagator = KickPropagator(params, 64, substeps=40)
        self.assertEqual(propagator.pulse_profile, params.pulse)
        self.assertAlmostEqual(propagator.dt * propagator.substeps, params.pulse.duration)
        self.assertEqual(propagator.substeps, 40)
        self.assertEqual(KickPropagator(params, 64).substeps, default_substeps(9.0))
        self.assertEqual(default_substeps(9.0), 150)
        self.assertEqual(default_substeps(20.0), 240)


class JumpTests(SimpleTestCase):

    def test_eigenstate_splits_into_adjacent_pair(self):
        state = new_momentum_eigenstate(2.0 * 1.5, 1.5, 32)
        for u in (-0.6, 0.0, 0.35):
            with self.subTest(u=u):
                jumped = apply_jump(state, u, 1.5)
                occupied = np.flatnonzero(np.abs(jumped.amplitudes) > 1e-14)
                self.assertEqual(len(occupied), 2)
                self.assertEqual(occupied[1] - occupied[0], 1)
                np.testing.assert_allclose(jumped.probabilities()[occupied], [0.5, 0.5])
                self.assertAlmostEqual(jumped.beta, (state.beta + 0.5 * (1 + u)) % 1.0, places=12)

    def test_u_one(self):
        state = new_momentum_eigenstate(0.25 * 2.0 + 3 * 2.0, 2.0, 32)
        jumped = apply_jump(state, 1.0, 2.0)
        self.assertAlmostEqual(jumped.beta, state.beta, places=12)
        self.assertEqual(np.flatnonzero(np.abs(jumped.amplitudes) > 0).tolist(), [16 + 3, 16 + 4])

    def test_mean_momentum_shift_matches_dense_operator(self):
        kbar = 1.7
        state = new_momentum_eigenstate(0.2 * kbar, kbar, 32)
        for u in (-1.0, -0.3, 0.5, 1.0):
            with self.subTest(u=u):
                jumped = apply_jump(state, u, kbar)
                mean_before = np.dot(state.probabilities(), state.momenta(kbar))
                mean_after = np.dot(jumped.probabilities(), jumped.momenta(kbar))
                self.assertAlmostEqual(mean_after - mean_before, 0.5 * u * kbar, places=10)

    def test_dense_operator_on_general_state(self):
        """cos(φ/2)e^{iuφ/2} évalué en position sur une grille fine"""
        kbar, u = 1.0, 0.4
        state = superposition({-2: 0.5, 0: 1.0, 1: 0.3 - 0.2j, 3: 0.4j}, 0.15)
        phi = np.linspace(0.0, 2.0 * np.pi, 4096, endpoint=False)
        def wave(s):
            return np.exp(1j * np.outer(phi, s.ladder + s.beta)) @ s.amplitudes
        expected = np.cos(phi / 2) * np.exp(0.5j * u * phi) * wave(state)
        expected /= np.sqrt(np.mean(np.abs(expected) ** 2))
        np.testing.assert_allclose(wave(apply_jump(state, u, kbar)), expected, atol=1e-10)

    def test_rejects_invalid_u(self):
        with self.assertRaises(InvalidParameterError):
            apply_jump(new_momentum_eigenstate(0.0, 1.0, 32), 1.5, 1.0)

    def test_jump_event_validation(self):
        with self.assertRaises(InvalidParameterError):
            JumpEvent(kick_index=0, time_in_pulse=0.001, recoil_u=-1.2, absorption_branch_shift=0.0)

    def test_jump_count_statistics(self):
        eta, trajectories = 0.2, 2000
        params = DimensionlessParams(kappa=0.0, kbar=2.0, eta=eta)
        propagator = KickPropagator(params, 64, substeps=50)
        rng = np.random.default_rng(4)
        counts = []
        for _ in range(trajectories):
            state = new_momentum_eigenstate(0.0, 2.0, 64)
            _, jumps = propagator.pulse(state, rng)
            counts.append(len(jumps))
        counts = np.asarray(counts)
        stderr = counts.std(ddof=1) / math.sqrt(trajectories)
        # Le second saut d'un même pulse voit ⟨cos φ⟩ = 1/2 : correction d'ordre η²
        self.assertLess(abs(counts.mean() - eta), 3 * stderr + eta ** 2)

    def test_jumps_recorded_inside_pulse(self):
        params = DimensionlessParams(kappa=3.0, kbar=1.0, eta=1.0)
        propagator = KickPropagator(params, 128)
        rng = np.random.default_rng(5)
        state = new_momentum_eigenstate(0.0, 1.0, 128)
        events = []
        for n in range(10):
            state, jumps = propagator.kick(state, rng, n)
            events.extend(jumps)
        self.assertTrue(events)
        for event in events:
            self.assertGreater(event.time_in_pulse, 0.0)
            self.assertLessEqual(event.time_in_pulse, params.alpha + 1e-15)
            self.assertTrue(0.0 <= event.absorption_branch_shift < 1.0)
        self.assertAlmostEqual(np.vdot(state.amplitudes, state.amplitudes).real, 1.0, places=10)


class GridOverflowTests(SimpleTestCase):

    def test_edge_population(self):
        state = superposition({-16: 1.0, 0: 1.0}, 0.0)
        self.assertAlmostEqual(edge_population(state), 0.5)

    def test_overflow_raises(self):
        params = DimensionlessParams(kappa=30.0, kbar=0.5)
        propagator = KickPropagator(params, 32)
        with self.assertRaises(GridOverflowError):
            propagator.kick(new_momentum_eigenstate(0.0, 0.5, 32), np.random.default_rng(6))


class RecoilTests(SimpleTestCase):

    def test_densities_normalized_and_symmetric(self):
        u = np.linspace(-1.0, 1.0, 200001)
        for kind in RecoilDistribution:
            with self.subTest(kind=kind):
                density = kind.density(u)
                self.assertAlmostEqual(np.trapezoid(density, u), 1.0, places=8)
                np.testing.assert_allclose(density, density[::-1])

    def test_inverse_cdf_endpoints(self):
        for kind in RecoilDistribution:
            with self.subTest(kind=kind):
                self.assertAlmostEqual(float(kind.inverse_cdf(0.0)), -1.0, places=10)
                self.assertAlmostEqual(float(kind.inverse_cdf(0.5)), 0.0, places=10)
                self.assertAlmostEqual(float(kind.inverse_cdf(1.0)), 1.0, places=10)

    def test_sample_moments(self):
        n = 100000
        for kind in RecoilDistribution:
            with self.subTest(kind=kind):
                samples = sample_recoil(kind, np.random.default_rng(7), size=n)
                self.assertTrue(np.all(np.abs(samples) <= 1.0))
                self.assertLess(abs(samples.mean()), 3 * samples.std() / math.sqrt(n))
                # Var(u²) ≤ 1 : erreur standard de la variance empirique ≤ 1/√n
                self.assertLess(abs(np.mean(samples ** 2) - kind.variance), 3 / math.sqrt(n))

    def test_scalar_sample(self):
        u = sample_recoil(RecoilDistribution.UNIFORM, np.random.default_rng(8))
        self.assertIsInstance(u, float)
