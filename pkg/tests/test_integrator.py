from unittest import TestCase

import numpy as np
import scipy.stats

from correlation import correlation_series
from errors import DomainError, StepSizeError
from force_field import ForceField, spring_energy
from integrator import BAOABIntegrator, step_baoab
from potentials.base_potential import PotentialTerm
from random_stream import RandomStream
from ring_polymer import RingPolymerState, initial_state, omega_p
from system import SystemSpec
from thermostat import ThermostatSpec

from fixtures import oscillator_field, oscillator_spec, oscillator_state


class TestBAOABIntegrator(TestCase):
    def test_hamiltonian_conserved_without_thermostat(self):
        spec = oscillator_spec()
        state = oscillator_state(spec, 4)
        integrator = BAOABIntegrator(spec, oscillator_field(spec), ThermostatSpec.none(), 0.01, 4)
        start = integrator.hamiltonian(state)

        integrator.run(state, 2000)

        self.assertLess(abs(integrator.hamiltonian(state) - start), 1e-3 * abs(start))
        self.assertEqual(state.step, 2000)
        self.assertAlmostEqual(state.time, 20.0)

    def test_free_particle_drifts(self):
        spec = SystemSpec(n_particles=1, masses=2.0, dimension=1, box_length=10.0, periodic=False, beta=1.0)
        state = RingPolymerState(np.zeros((1, 1, 1)), np.full((1, 1, 1), 4.0), RandomStream(0))
        integrator = BAOABIntegrator(spec, ForceField.from_spec(spec), ThermostatSpec.none(), 0.1, 1)

        integrator.run(state, 10)

        self.assertAlmostEqual(state.positions[0, 0, 0], 2.0)
        self.assertAlmostEqual(state.momenta[0, 0, 0], 4.0)

    def test_seeded_runs_are_bit_identical(self):
        spec = oscillator_spec()
        runs = []
        for _ in range(2):
            state = oscillator_state(spec, 8, seed=99)
            BAOABIntegrator(spec, oscillator_field(spec), ThermostatSpec.pile_l(1.0), 0.05, 8).run(state, 200)
            runs.append(state)

        self.assertTrue(runs[0].same_as(runs[1]))

    def test_pile_l_samples_temperature(self):
        spec = oscillator_spec(beta=2.0)
        state = oscillator_state(spec, 1, seed=5)
        integrator = BAOABIntegrator(spec, oscillator_field(spec), ThermostatSpec.pile_l(0.5), 0.05, 1)

        momenta = []
        for _ in range(40000):
            integrator.step(state)
            momenta.append(state.momenta[0, 0, 0])

        self.assertAlmostEqual(np.mean(np.square(momenta)), 0.5, delta=0.06)

    def test_step_size_limits(self):
        spec = oscillator_spec()
        field = oscillator_field(spec)

        with self.assertRaises(StepSizeError):
            BAOABIntegrator(spec, field, ThermostatSpec.none(), 0.1, 64)
        with self.assertLogs("BAOABIntegrator", level="WARNING"):
            BAOABIntegrator(spec, field, ThermostatSpec.none(), 0.05, 64)
        with self.assertRaises(DomainError):
            BAOABIntegrator(spec, field, ThermostatSpec.none(), 0.0, 4)

    def test_step_baoab_matches_integrator(self):
        spec = oscillator_spec()
        first = oscillator_state(spec, 4, seed=1)
        second = first.copy()

        step_baoab(first, oscillator_field(spec), spec, ThermostatSpec.pile_l(1.0), 0.05)
        BAOABIntegrator(spec, oscillator_field(spec), ThermostatSpec.pile_l(1.0), 0.05, 4).step(second)

        self.assertTrue(first.same_as(second))


class TestThermostatSpec(TestCase):
    def test_pile_l_frictions(self):
        thermostat = ThermostatSpec.pile_l(tau=2.0)

        self.assertTrue(np.allclose(thermostat.mode_frictions(np.array([0.0, 1.0, 3.0])), [0.5, 2.0, 6.0]))

    def test_rejects_bad_tau(self):
        with self.assertRaises(DomainError):
            ThermostatSpec.pile_l(tau=0.0)

    def test_kind_is_case_insensitive(self):
        self.assertEqual(ThermostatSpec("PILE_L", tau=1.0).kind.value, "pile_l")


POSITIONS = np.array([[0.0, 0.0], [1.05, 0.2], [1.6, 1.1]])
TERMS = [
    PotentialTerm("harmonic_bond", (0, 1), k=3.0, r0=1.1),
    PotentialTerm("morse", (1, 2), D=2.0, a=1.3, r0=1.0),
    PotentialTerm("lennard_jones", (0, 2), epsilon=0.5, sigma=1.0, cutoff=2.5),
]


def triatomic_spec(beta: float = 1.0) -> SystemSpec:
    return SystemSpec(
        n_particles=3, masses=[1.0, 2.0, 1.0], dimension=2, box_length=20.0, periodic=False, beta=beta,
        topology=TERMS,
    )


def velocity_verlet(field, masses, positions, momenta, dt):
    _, forces = field.evaluate(positions)
    momenta = momenta + 0.5 * dt * forces
    positions = positions + dt * momenta / masses[:, None, None]
    _, forces = field.evaluate(positions)
    return positions, momenta + 0.5 * dt * forces


class TestHamiltonianLimit(TestCase):
    def energy_drift(self, spec, n_beads, dt, n_steps, window=1000, seed=3):
        integrator = BAOABIntegrator(spec, oscillator_field(spec), ThermostatSpec.none(), dt, n_beads)
        state = oscillator_state(spec, n_beads, seed=seed)

        energies = [integrator.hamiltonian(state)]
        for _ in range(n_steps):
            integrator.step(state)
            energies.append(integrator.hamiltonian(state))

        # splitting error oscillates; window means expose the secular part
        energies = np.array(energies)
        return abs(energies[-window:].mean() - energies[:window].mean()) / abs(energies[0]), integrator

    def test_ring_drift_at_tenth_of_fastest_mode(self):
        spec = oscillator_spec()
        dt = 0.1 / (2.0 * omega_p(1.0, 1.0, 4))

        drift, integrator = self.energy_drift(spec, 4, dt, 10000)

        self.assertAlmostEqual(dt * integrator.mode_omega.max(), 0.1)
        self.assertLess(drift, 1e-5)

    def test_single_bead_drift(self):
        drift, _ = self.energy_drift(oscillator_spec(), 1, 0.01, 10000)

        self.assertLess(drift, 1e-6)

    def test_single_bead_is_velocity_verlet(self):
        spec = triatomic_spec()
        field = ForceField.from_spec(spec)
        integrator = BAOABIntegrator(spec, field, ThermostatSpec.none(), 0.01, 1)
        state = RingPolymerState(POSITIONS[:, None, :], 0.5 * RandomStream(17).normal((3, 1, 2)), RandomStream(0))

        for _ in range(200):
            expected = velocity_verlet(field, spec.mass_array, state.positions, state.momenta, 0.01)
            integrator.step(state)
            self.assertTrue(np.allclose(state.positions, expected[0], rtol=0.0, atol=1e-12))
            self.assertTrue(np.allclose(state.momenta, expected[1], rtol=0.0, atol=1e-12))


class TestNormalModeStep(TestCase):
    def test_round_trip_through_integrator(self):
        spec = triatomic_spec()
        field = ForceField.from_spec(spec)
        for n_beads in (1, 2, 3, 4, 7, 64):
            integrator = BAOABIntegrator(spec, field, ThermostatSpec.none(), 0.001, n_beads)
            for seed in range(5):
                with self.subTest(n_beads=n_beads, seed=seed):
                    beads = RandomStream(seed, n_beads).normal((3, n_beads, 2))
                    modes = integrator.modes.to_normal(beads)

                    self.assertTrue(np.allclose(integrator.modes.from_normal(modes), beads, rtol=0.0, atol=1e-12))

                    # the spring energy is diagonal in the mode coordinates
                    state = RingPolymerState(beads, np.zeros_like(beads), RandomStream(0))
                    diagonal = 0.5 * np.sum(
                        spec.mass_array[:, None, None] * integrator.mode_omega[None, :, None] ** 2 * modes**2
                    )
                    self.assertAlmostEqual(spring_energy(spec, state), diagonal, delta=1e-12 * max(1.0, diagonal))


class TestPileL(TestCase):
    def test_centroid_friction_from_momentum_decay(self):
        spec = SystemSpec(n_particles=64, masses=1.0, dimension=1, box_length=10.0, periodic=False, beta=1.0)
        tau = 0.5
        dt = 0.05
        integrator = BAOABIntegrator(spec, ForceField.from_spec(spec), ThermostatSpec.pile_l(tau), dt, 1)
        state = initial_state(spec, 1, np.zeros((64, 1)), RandomStream(23))

        momenta = np.empty((20000, 64))
        for index in range(len(momenta)):
            integrator.step(state)
            momenta[index] = state.momenta[:, 0, 0]

        lags = np.arange(11)
        correlation = np.mean([correlation_series(series, series, 10) for series in momenta.T], axis=0)
        times = lags * dt
        decay = np.log(correlation / correlation[0])
        rate = -np.sum(times * decay) / np.sum(times**2)

        self.assertAlmostEqual(rate, 1.0 / tau, delta=0.05 / tau)
        self.assertAlmostEqual(correlation[0], spec.temperature, delta=0.03)

    def test_mode_momenta_are_maxwellian(self):
        n_particles = 100000
        spec = SystemSpec(
            n_particles=n_particles, masses=2.0, dimension=1, box_length=10.0, periodic=False, beta=1.0
        )
        integrator = BAOABIntegrator(spec, ForceField.from_spec(spec), ThermostatSpec.pile_l(0.5), 0.05, 4)
        state = initial_state(spec, 4, np.zeros((n_particles, 1)), RandomStream(29))

        integrator.run(state, 300)

        # particles are independent, so one snapshot gives independent samples per mode
        modes = integrator.modes.to_normal(state.momenta)[:, :, 0] / np.sqrt(2.0 * spec.temperature)
        for k in range(4):
            with self.subTest(mode=k):
                self.assertGreater(scipy.stats.kstest(modes[:, k], "norm").pvalue, 0.01 / 4)
        self.assertGreater(scipy.stats.kstest(modes.reshape(-1), "norm").pvalue, 0.01)
