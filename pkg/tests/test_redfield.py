import math
from unittest import TestCase

import numpy as np

from density_matrix import DensityMatrix
from errors import ConfigurationError, DomainError
from lindblad import LindbladGenerator
from positivity import positivity_report
from presets import EXCITED, operator
from propagator import evolve
from random_stream import RandomStream
from redfield import (
    RateTable,
    RedfieldGenerator,
    ViolationScan,
    bloch_state,
    coupled_qubit,
    merge_frequencies,
    nonsecular_qubit_case,
    redfield_rhs,
    secular_reduce,
)

RANDOM = np.array([[0.3 + 0.1j, -0.2j], [0.7, 0.4 - 0.5j]])


class TestRateTable(TestCase):
    def test_lookup(self):
        table = RateTable({1.0: 2.0 + 0.5j, -1.0: 0.3})

        self.assertEqual(table(1.0 + 1e-12), 2.0 + 0.5j)
        self.assertEqual(table(-1.0), 0.3)
        self.assertEqual(table(0.0), 0j)

    def test_rejects_non_finite(self):
        with self.assertRaises(DomainError):
            RateTable([(1.0, math.inf)])

    def test_merge_frequencies(self):
        merged = merge_frequencies([1.0, 0.0, 1.0 + 1e-12, -1.0, 1.0 + 1e-6])

        self.assertEqual(len(merged), 4)
        self.assertTrue(np.allclose(merged, [-1.0, 0.0, 1.0, 1.0 + 1e-6], rtol=0.0, atol=1e-11))


class TestRedfieldGenerator(TestCase):
    def setUp(self):
        self.gen, self.rho0 = nonsecular_qubit_case(omega0=1.0, gamma=1.0, alpha2=1.0)

    def test_bohr_components(self):
        components = dict(self.gen.bohr_components(operator("sigma_x")))

        self.assertEqual(sorted(components), [-1.0, 1.0])
        self.assertTrue(np.allclose(components[1.0], operator("sigma_minus")))
        self.assertTrue(np.allclose(components[-1.0], operator("sigma_plus")))

    def test_superoperator_matches_rhs(self):
        applied = self.gen.superoperator() @ RANDOM.reshape(-1)

        self.assertTrue(np.allclose(applied.reshape(2, 2), redfield_rhs(self.gen, RANDOM)))

    def test_trace_preserving_and_hermitian(self):
        derivative = self.gen.rhs(self.rho0)

        self.assertAlmostEqual(abs(np.trace(derivative)), 0.0)
        self.assertTrue(np.allclose(derivative, derivative.conj().T))

    def test_initial_state(self):
        self.assertAlmostEqual(self.rho0.entries[0, 0].real, 0.25)
        self.assertAlmostEqual(self.rho0.min_eigenvalue(), 0.0)

    def test_smallest_eigenvalue_falls_at_quarter_rate(self):
        gen, rho0 = nonsecular_qubit_case(omega0=1.0, gamma=2.0, alpha2=0.5)

        trajectory = evolve(gen, rho0, 0.01, 1e-4)

        self.assertAlmostEqual(trajectory.final().min_eigenvalue() / 0.01, -0.25 * 0.5 * 2.0, delta=0.01)

    def test_validation(self):
        with self.assertRaises(DomainError):
            RedfieldGenerator(operator("sigma_z"), [(operator("sigma_minus"), {1.0: 1.0})])
        with self.assertRaises(DomainError):
            RedfieldGenerator(operator("sigma_z"), [], alpha2=-1.0)
        with self.assertRaises(DomainError):
            RedfieldGenerator(operator("sigma_z"), [(np.eye(3), {1.0: 1.0})])


class TestSecularReduce(TestCase):
    def test_one_sided_table_gives_decay(self):
        gen, _ = nonsecular_qubit_case(gamma=1.5, alpha2=0.4)

        reduced = secular_reduce(gen)

        self.assertIsInstance(reduced, LindbladGenerator)
        self.assertEqual(len(reduced.jumps), 1)
        jump, rate = reduced.jumps[0]
        self.assertTrue(np.allclose(jump, operator("sigma_minus")))
        self.assertAlmostEqual(rate, 2 * 0.4 * 1.5)
        self.assertTrue(np.allclose(reduced.hamiltonian, gen.hamiltonian))

    def test_reduced_evolution_stays_positive(self):
        gen, rho0 = nonsecular_qubit_case()

        report = positivity_report(evolve(secular_reduce(gen), rho0, 2.0, 0.001, record_every=10))

        self.assertFalse(report.violated)

    def test_lamb_shift(self):
        gen = RedfieldGenerator(
            0.5 * operator("sigma_z"), [(operator("sigma_x"), RateTable({1.0: 0.2 + 0.3j}))], alpha2=2.0
        )

        reduced = secular_reduce(gen)

        # hbar alpha^2 Im R sigma_+ sigma_- adds 0.6 to the excited level
        self.assertTrue(np.allclose(reduced.hamiltonian, np.diag([0.5 + 0.6, -0.5])))
        self.assertAlmostEqual(reduced.jumps[0][1], 2 * 2.0 * 0.2)

    def test_negative_rate_rejected(self):
        gen = RedfieldGenerator(0.5 * operator("sigma_z"), [(operator("sigma_x"), RateTable({1.0: -0.5}))])

        with self.assertRaises(ConfigurationError):
            secular_reduce(gen)


class TestPositivity(TestCase):
    def test_redfield_case_violates(self):
        gen, rho0 = nonsecular_qubit_case()

        report = positivity_report(evolve(gen, rho0, 0.5, 0.001, record_every=10), generator="redfield")

        self.assertTrue(report.violated)
        self.assertEqual(report.first_violation, report.times[1])
        self.assertLess(report.min_eigenvalues.min(), 0.0)
        self.assertEqual(len(list(report.rows())), len(report.times))

    def test_lindblad_stays_physical(self):
        gen = LindbladGenerator.thermal_qubit(1.0, 1.0, 0.5)

        report = positivity_report(evolve(gen, DensityMatrix.pure(EXCITED), 3.0, 0.01), generator="lindblad")

        self.assertFalse(report.violated)
        self.assertIsNone(report.first_violation)
        self.assertTrue(np.all(report.purities <= 1.0 + 1e-12))

    def test_empty_trajectory(self):
        with self.assertRaises(DomainError):
            positivity_report([])


class TestViolationScan(TestCase):
    def test_scan_in_input_order(self):
        scan = ViolationScan(t_final=0.2, dt=0.001, max_workers=3)

        results = scan.run([0.0, 0.5 * math.pi], [2.0 * math.pi / 3.0, 0.0])

        self.assertEqual([(row["angle"], row["theta"]) for row in results], [
            (0.0, 2.0 * math.pi / 3.0), (0.0, 0.0), (0.5 * math.pi, 2.0 * math.pi / 3.0), (0.5 * math.pi, 0.0)
        ])
        self.assertIsNotNone(results[0]["first_violation"])
        self.assertIsNone(results[2]["first_violation"])
        self.assertIsNone(results[3]["first_violation"])

    def test_bloch_state_matches_case(self):
        _, rho0 = nonsecular_qubit_case()

        self.assertTrue(np.allclose(bloch_state(2.0 * math.pi / 3.0, 0.0).entries, rho0.entries))

    def test_coupled_qubit_angle(self):
        self.assertEqual(len(coupled_qubit(0.0).components[0]), 2)
        self.assertTrue(np.allclose(coupled_qubit(0.5 * math.pi).lambdas[0], 0.0))


class TestSecularConsistency(TestCase):
    def random_secular(self, draws: RandomStream) -> RedfieldGenerator:
        """Couplings diagonal in the eigenbasis of H carry only the zero Bohr frequency."""
        dim = int(draws.generator.integers(2, 5))
        square = draws.normal((dim, dim)) + 1j * draws.normal((dim, dim))
        hamiltonian = 0.5 * (square + square.conj().T)
        _, basis = np.linalg.eigh(hamiltonian)
        couplings = []
        for _ in range(int(draws.generator.integers(1, 3))):
            coupling = basis @ np.diag(draws.normal(dim)) @ basis.conj().T
            rate = complex(draws.generator.uniform(0.0, 1.0), draws.generator.uniform(-0.5, 0.5))
            couplings.append((0.5 * (coupling + coupling.conj().T), RateTable({0.0: rate})))
        return RedfieldGenerator(hamiltonian, couplings, alpha2=float(draws.generator.uniform(0.1, 2.0)))

    def test_already_secular_generator_unchanged_by_reduction(self):
        for seed in range(20):
            draws = RandomStream(seed, 41)
            gen = self.random_secular(draws)
            reduced = secular_reduce(gen)
            for case in range(5):
                with self.subTest(seed=seed, case=case):
                    rho = draws.normal((gen.dim, gen.dim)) + 1j * draws.normal((gen.dim, gen.dim))

                    self.assertTrue(np.allclose(redfield_rhs(gen, rho), reduced.rhs(rho), rtol=0.0, atol=1e-12))

    def test_dephasing_qubit(self):
        gen = RedfieldGenerator(
            0.5 * operator("sigma_z"), [(operator("sigma_z"), RateTable({0.0: 0.4 + 0.1j}))], alpha2=1.5
        )

        reduced = secular_reduce(gen)

        self.assertEqual(len(reduced.jumps), 1)
        self.assertAlmostEqual(reduced.jumps[0][1], 2.0 * 1.5 * 0.4)
        self.assertTrue(np.allclose(gen.superoperator(), reduced.superoperator(), rtol=0.0, atol=1e-12))
