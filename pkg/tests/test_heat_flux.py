import math
from unittest import TestCase

import numpy as np

from branch_manager import run_branch
from branch_plan import BranchPlan, PerturbationSpec
from chain import build_chain
from errors import ContractError, DomainError, InsufficientDataError
from force_field import ForceField
from heat_flux import FluxRecord, atom_flux, energy_audit, heat_flux
from potentials.base_potential import PotentialTerm
from random_stream import RandomStream
from regions import RegionLayout, assign_regions
from ring_polymer import RingPolymerState, initial_state
from steady_state import steady_state_detector
from system import SystemSpec
from temperature_profile import ProfileAccumulator, ProfileMode, temperature_profile
from thermal_recorder import ThermalRecorder

LAYOUT = RegionLayout(0, [0.0, 2.0, 4.0, 6.0, 8.0, 10.0], ["hot", "middle", "cold", "middle", "hot"], 10.0)


def free_spec(n_particles, **overrides):
    arguments = dict(n_particles=n_particles, masses=1.0, dimension=1, box_length=10.0, periodic=True, beta=1.0)
    arguments.update(overrides)
    return SystemSpec(**arguments)


def state_of(positions, momenta):
    positions = np.asarray(positions, dtype=float)
    return RingPolymerState(positions, np.asarray(momenta, dtype=float), RandomStream(0))


class TestAtomFlux(TestCase):
    def test_stretched_bond(self):
        bond = PotentialTerm("harmonic_bond", (0, 1), k=1.0, r0=1.0)
        spec = free_spec(2, periodic=False, topology=[bond])
        state = state_of([[[0.0]], [[1.5]]], [[[1.0]], [[0.0]]])

        flux = atom_flux(state, ForceField.from_spec(spec), spec, 0)

        # e_0 v_0 = (0.5 + 0.0625) and the pair term -1/2 * 1.5 * (0.5 * 1)
        self.assertTrue(np.allclose(flux, [[0.1875], [0.0]]))

    def test_zero_velocities(self):
        bond = PotentialTerm("morse", (0, 1), D=1.0, a=1.0, r0=1.0)
        spec = free_spec(2, topology=[bond])
        state = state_of([[[0.0], [0.1]], [[1.3], [1.2]]], np.zeros((2, 2, 1)))

        self.assertTrue(np.allclose(atom_flux(state, ForceField.from_spec(spec), spec, 0), 0.0))

    def test_angles_not_supported(self):
        angle = PotentialTerm("harmonic_angle", (0, 1, 2), k_theta=1.0, theta0=2.0)
        spec = SystemSpec(n_particles=3, masses=1.0, dimension=2, box_length=10.0, periodic=False, beta=1.0,
                          topology=[angle])
        state = state_of(np.zeros((3, 1, 2)), np.zeros((3, 1, 2)))

        with self.assertRaises(ContractError):
            atom_flux(state, ForceField.from_spec(spec), spec, 0)


class TestHeatFlux(TestCase):
    def test_middle_regions_signed_hot_to_cold(self):
        spec = free_spec(2)
        state = state_of([[[3.0]], [[7.0]]], [[[1.0]], [[1.0]]])
        labels = assign_regions(LAYOUT, state)

        records = heat_flux(state, ForceField.from_spec(spec), spec, labels, LAYOUT)

        self.assertEqual([record.region for record in records], [1, 3])
        self.assertAlmostEqual(records[0].flux, 0.5)
        self.assertAlmostEqual(records[1].flux, -0.5)
        self.assertAlmostEqual(records[0].current, 0.25)

    def test_empty_region_has_zero_flux(self):
        spec = free_spec(1)
        state = state_of([[[3.0]]], [[[1.0]]])

        records = heat_flux(state, ForceField.from_spec(spec), spec, assign_regions(LAYOUT, state), LAYOUT)

        self.assertEqual(records[1].flux, 0.0)

    def test_record_must_be_finite(self):
        with self.assertRaises(DomainError):
            FluxRecord(0.0, math.nan, 1)

    def test_energy_audit(self):
        records = [FluxRecord(0.0, 0.0, 1, 0.5), FluxRecord(1.0, 0.0, 1, 1.5), FluxRecord(0.0, 0.0, 3, 1.0)]
        heat = np.array([3.0, 0.0, -5.0, 0.0, 1.0])

        audit = energy_audit(records, heat, 2.0, LAYOUT)

        self.assertAlmostEqual(audit.bath_power, 0.5 * (4.0 + 5.0) / 2.0)
        self.assertAlmostEqual(audit.flux_power, 2.0)
        self.assertAlmostEqual(audit.relative_error, abs(2.0 - 2.25) / 2.25)
        with self.assertRaises(DomainError):
            energy_audit(records, heat, 0.0, LAYOUT)


class TestTemperatureProfile(TestCase):
    def test_bead_kinetic_bins(self):
        state = state_of([[[1.0], [1.0]], [[1.2], [1.2]], [[6.5], [6.5]]], [[[1.0], [-1.0]], [[2.0], [0.0]], [[0.0], [0.0]]])

        with self.assertLogs("temperature_profile", level="WARNING"):
            bins = temperature_profile([state], LAYOUT, 5, "bead_kinetic", np.ones(3))

        self.assertAlmostEqual(bins[0].center, 1.0)
        self.assertEqual(bins[0].count, 2)
        self.assertAlmostEqual(bins[0].temperature, (1.0 + 1.0 + 4.0) / 4)
        self.assertIsNone(bins[1].temperature)
        self.assertEqual(bins[3].temperature, 0.0)

    def test_centroid_kinetic(self):
        state = state_of([[[1.0], [1.0]]], [[[1.0], [-1.0]]])
        accumulator = ProfileAccumulator(LAYOUT, 1, ProfileMode.CENTROID_KINETIC, np.ones(1))
        accumulator.add(state)

        self.assertEqual(accumulator.bins()[0].temperature, 0.0)

    def test_merge(self):
        first = ProfileAccumulator(LAYOUT, 2, "bead_kinetic", np.ones(1))
        second = ProfileAccumulator(LAYOUT, 2, "bead_kinetic", np.ones(1))
        first.add(state_of([[[1.0]]], [[[1.0]]]))
        second.add(state_of([[[1.0]]], [[[3.0]]]))

        first.merge(second)

        self.assertAlmostEqual(first.bins()[0].temperature, 5.0)

    def test_rejects_bad_span(self):
        with self.assertRaises(DomainError):
            ProfileAccumulator(LAYOUT, 4, "bead_kinetic", np.ones(1), span=(2.0, 12.0))
        with self.assertRaises(DomainError):
            ProfileAccumulator(LAYOUT, 0, "bead_kinetic", np.ones(1))


class TestSteadyState(TestCase):
    def test_flat_series_steady_at_start(self):
        result = steady_state_detector(np.arange(40.0), {"T": np.ones(40), "J": np.zeros(40)}, 10, 0.01)

        self.assertTrue(result)
        self.assertEqual(result.onset_time, 0.0)

    def test_onset_after_transient(self):
        temperature = np.concatenate([np.linspace(0.0, 1.0, 20), np.ones(40)])

        result = steady_state_detector(np.arange(60.0), {"T": temperature}, 10, 0.02)

        self.assertTrue(result.steady)
        self.assertEqual(result.window_index, 2)
        self.assertEqual(result.onset_time, 20.0)

    def test_every_series_must_settle(self):
        times = np.arange(40.0)

        result = steady_state_detector(times, {"T": np.ones(40), "J": times}, 10, 0.2)

        self.assertFalse(result)
        self.assertIsNone(result.onset_time)

    def test_tolerance_is_relative_to_series_magnitude(self):
        times = np.arange(40.0)
        # window means 100, 101, 100, 101
        level = 100.0 + np.repeat([0.0, 1.0, 0.0, 1.0], 10)

        self.assertTrue(steady_state_detector(times, {"T": level}, 10, 0.02))
        self.assertFalse(steady_state_detector(times, {"T": level}, 10, 0.005))
        for scale in (1e-3, 1.0, 1e3):
            with self.subTest(scale=scale):
                result = steady_state_detector(times, {"T": scale * level}, 10, 0.02)
                self.assertEqual(result.window_index, 0)

    def test_needs_two_windows(self):
        with self.assertRaises(InsufficientDataError):
            steady_state_detector(np.arange(15.0), {"T": np.ones(15)}, 10, 0.1)
        with self.assertRaises(DomainError):
            steady_state_detector(np.arange(15.0), {"T": np.ones(14)}, 5, 0.1)


class TestThermalRecorder(TestCase):
    def test_records_branch_under_gradient(self):
        setup = build_chain(n_middle=4)
        state = initial_state(setup.spec, 2, setup.positions, RandomStream(6))
        perturbation = PerturbationSpec("thermal_gradient", layout=setup.layout, t_hot=1.2, t_cold=0.8)
        plan = BranchPlan(1, 1, 400, 0.01, perturbation=perturbation, record_stride=20)
        recorder = ThermalRecorder(setup.spec, setup.field, setup.layout, 8, ProfileMode.BEAD_KINETIC, 200)

        run_branch(state, perturbation, plan, setup.spec, setup.field, ["potential_energy"], recorders=[recorder])

        self.assertEqual(len(recorder.times), 20)
        self.assertEqual(len(recorder.production_fluxes), 10 * 2)
        self.assertAlmostEqual(recorder.production_time, 2.0)
        self.assertTrue(np.all(np.isfinite(recorder.heat)))
        self.assertEqual(recorder.heat[1], 0.0)
        self.assertTrue(math.isfinite(recorder.production_temperature()))
        self.assertTrue(math.isfinite(recorder.production_flux()))
        self.assertEqual(sum(profile_bin.count for profile_bin in recorder.profile.bins()), 10 * 16)
