import itertools
import math
from unittest import TestCase

import numpy as np

from errors import SingularConfigurationError
from force_field import ForceField, energy_bead_slice, forces_bead_slice, spring_energy, total_ring_potential
from potentials.base_potential import PotentialTerm
from random_stream import RandomStream
from ring_polymer import RingPolymerState, next_bead, previous_bead
from system import SystemSpec

TERMS = [
    PotentialTerm("harmonic_bond", (0, 1), k=3.0, r0=1.1),
    PotentialTerm("morse", (1, 2), D=2.0, a=1.3, r0=1.0),
    PotentialTerm("lennard_jones", (0, 2), epsilon=0.5, sigma=1.0, cutoff=2.5),
    PotentialTerm("harmonic_angle", (0, 1, 2), k_theta=1.5, theta0=2.0),
    PotentialTerm("external_well", (0, 2), k_ext=0.7, center=[0.2, -0.1]),
]
POSITIONS = np.array([[0.0, 0.0], [1.05, 0.2], [1.6, 1.1]])


def numerical_forces(field, positions, h=1e-6):
    forces = np.zeros_like(positions)
    for index in np.ndindex(positions.shape):
        shifted = positions.copy()
        shifted[index] += h
        up = field.evaluate(shifted[:, None, :])[0][0]
        shifted[index] -= 2 * h
        down = field.evaluate(shifted[:, None, :])[0][0]
        forces[index] = -(up - down) / (2 * h)
    return forces


class TestForceField(TestCase):
    def test_forces_are_negative_gradient(self):
        for term in TERMS:
            with self.subTest(kind=term.kind.value):
                field = ForceField([term], [20.0, 20.0], [False, False])
                _, forces = field.evaluate(POSITIONS[:, None, :])
                self.assertTrue(np.allclose(forces[:, 0, :], numerical_forces(field, POSITIONS), atol=1e-6))

    def test_internal_forces_sum_to_zero(self):
        field = ForceField(TERMS[:4], [20.0, 20.0], [False, False])
        _, forces = field.evaluate(POSITIONS[:, None, :])

        self.assertTrue(np.allclose(forces.sum(axis=0), 0.0, atol=1e-12))

    def test_minimum_image_pairs(self):
        bond = PotentialTerm("harmonic_bond", (0, 1), k=1.0, r0=1.0)
        field = ForceField([bond], [10.0], [True])

        energy, forces = field.evaluate(np.array([[[0.5]], [[9.5]]]))

        self.assertAlmostEqual(energy[0], 0.0)
        self.assertTrue(np.allclose(forces, 0.0))

    def test_lennard_jones_shift(self):
        lj = PotentialTerm("lennard_jones", (0, 1), epsilon=1.0, sigma=1.0, cutoff=2.5)
        field = ForceField([lj], [100.0], [False])

        just_inside = field.evaluate(np.array([[[0.0]], [[2.5 - 1e-9]]]))[0][0]
        beyond = field.evaluate(np.array([[[0.0]], [[3.0]]]))[0][0]
        minimum = field.evaluate(np.array([[[0.0]], [[2 ** (1 / 6)]]]))[0][0]

        self.assertAlmostEqual(just_inside, 0.0, places=6)
        self.assertEqual(beyond, 0.0)
        sr6 = (1 / 2.5) ** 6
        self.assertAlmostEqual(minimum, -1.0 - 4.0 * (sr6**2 - sr6))

    def test_coincident_pair_raises(self):
        bond = PotentialTerm("morse", (0, 1), D=1.0, a=1.0, r0=1.0)
        field = ForceField([bond], [10.0], [False])

        with self.assertRaises(SingularConfigurationError):
            field.evaluate(np.zeros((2, 1, 1)))

    def test_slices_evaluated_independently(self):
        field = ForceField(TERMS, [20.0, 20.0], [False, False])
        beads = np.stack([POSITIONS, POSITIONS + 0.05], axis=1)

        energy, forces = field.evaluate(beads)

        first, _ = field.evaluate(POSITIONS[:, None, :])
        self.assertAlmostEqual(energy[0], first[0])
        self.assertTrue(np.allclose(forces[:, 1, :], field.evaluate(beads[:, 1:2, :])[1][:, 0, :]))

    def test_external_field(self):
        def push(positions):
            return np.zeros(positions.shape[1]), np.ones_like(positions)

        field = ForceField([], [10.0], [False]).with_external(push)

        _, forces = field.evaluate(np.zeros((2, 3, 1)))

        self.assertTrue(field.has_external)
        self.assertTrue(np.allclose(forces, 1.0))

    def test_particle_energies_add_up(self):
        field = ForceField([TERMS[0], TERMS[1], TERMS[4]], [20.0, 20.0], [False, False])

        energies = field.particle_energies(POSITIONS[:, None, :])

        self.assertAlmostEqual(energies.sum(), field.evaluate(POSITIONS[:, None, :])[0][0])


class TestBeadSlice(TestCase):
    def setUp(self):
        self.spec = SystemSpec(
            n_particles=3, masses=[1.0, 2.0, 1.0], dimension=2, box_length=20.0, periodic=False, beta=1.0,
            topology=TERMS,
        )
        self.field = ForceField.from_spec(self.spec)

    def test_slice_helpers(self):
        energy = energy_bead_slice(self.field, self.spec, POSITIONS)
        forces = forces_bead_slice(self.field, self.spec, POSITIONS)

        self.assertTrue(math.isfinite(energy))
        self.assertEqual(forces.shape, (3, 2))

    def test_spring_energy(self):
        positions = np.zeros((3, 2, 2))
        positions[1, 1, 0] = 0.5
        state = RingPolymerState(positions, np.zeros_like(positions), RandomStream(0))

        # two springs close the P = 2 ring, each m omega_P^2 / 2 * 0.25 with omega_P^2 = 2
        self.assertAlmostEqual(spring_energy(self.spec, state), 2 * 0.5 * 2.0 * 2.0 * 0.25)

    def test_single_bead_has_no_springs(self):
        state = RingPolymerState(POSITIONS[:, None, :], np.zeros((3, 1, 2)), RandomStream(0))

        self.assertEqual(spring_energy(self.spec, state), 0.0)
        self.assertAlmostEqual(total_ring_potential(self.field, self.spec, state), energy_bead_slice(self.field, self.spec, POSITIONS))


class TestForceFieldProperties(TestCase):
    def configurations(self, n_per_seed=10):
        for seed in range(10):
            draws = RandomStream(seed, 5)
            for case in range(n_per_seed):
                yield seed, case, POSITIONS + 0.1 * draws.normal(POSITIONS.shape)

    def test_gradient_matches_central_differences(self):
        fields = [(term.kind.value, ForceField([term], [20.0, 20.0], [False, False])) for term in TERMS]
        for seed, case, positions in self.configurations():
            for kind, field in fields:
                with self.subTest(seed=seed, case=case, kind=kind):
                    _, forces = field.evaluate(positions[:, None, :])
                    error = np.max(np.abs(forces[:, 0, :] - numerical_forces(field, positions)))
                    self.assertLess(error, 1e-6 * max(1.0, np.max(np.abs(forces))))

    def test_energy_translation_invariant(self):
        for periodic in (False, True):
            field = ForceField(TERMS[:4], [20.0, 20.0], [periodic, periodic])
            for seed, case, positions in self.configurations(n_per_seed=2):
                with self.subTest(periodic=periodic, seed=seed, case=case):
                    shift = 5.0 * RandomStream(seed, 6 + case).normal(2)
                    energy, forces = field.evaluate(positions[:, None, :])
                    moved, moved_forces = field.evaluate((positions + shift)[:, None, :])

                    self.assertLess(abs(moved[0] - energy[0]), 1e-12 * max(1.0, abs(energy[0])))
                    self.assertTrue(np.allclose(moved_forces, forces, rtol=0.0, atol=1e-12))

    def test_other_bead_slices_untouched(self):
        field = ForceField(TERMS, [20.0, 20.0], [False, False])
        beads = np.stack([POSITIONS + 0.05 * RandomStream(9, j).normal(POSITIONS.shape) for j in range(4)], axis=1)
        _, forces = field.evaluate(beads)

        moved = beads.copy()
        moved[1, 2, :] += 0.1
        _, moved_forces = field.evaluate(moved)

        for j in (0, 1, 3):
            self.assertTrue(np.array_equal(moved_forces[:, j, :], forces[:, j, :]))
        self.assertFalse(np.array_equal(moved_forces[:, 2, :], forces[:, 2, :]))

    def test_ring_hessian_sparsity(self):
        spec = SystemSpec(
            n_particles=3, masses=[1.0, 2.0, 1.0], dimension=2, box_length=20.0, periodic=False, beta=1.0,
            topology=TERMS,
        )
        field = ForceField.from_spec(spec)
        n_beads = 5
        beads = np.stack(
            [POSITIONS + 0.05 * RandomStream(11, j).normal(POSITIONS.shape) for j in range(n_beads)], axis=1
        )
        step = 1e-3

        def energy(*moves):
            positions = beads.copy()
            for index in moves:
                positions[index] += step
            state = RingPolymerState(positions, np.zeros_like(positions), RandomStream(0))
            return total_ring_potential(field, spec, state)

        base = energy()
        single = {index: energy(index) for index in np.ndindex(beads.shape)}
        for a, b in itertools.combinations(list(np.ndindex(beads.shape)), 2):
            mixed = energy(a, b) - single[a] - single[b] + base
            (particle_a, bead_a, axis_a), (particle_b, bead_b, axis_b) = a, b
            neighbours = bead_b in (next_bead(bead_a, n_beads), previous_bead(bead_a, n_beads))
            coupled = bead_a == bead_b or (particle_a == particle_b and neighbours)
            with self.subTest(a=a, b=b):
                if not coupled:
                    self.assertLess(abs(mixed), 1e-10)
                elif particle_a == particle_b and axis_a == axis_b and neighbours:
                    # spring cross term -m omega_P^2 step^2
                    self.assertGreater(abs(mixed), 1e-7)
