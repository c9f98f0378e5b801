import copy
import json
import os
import tempfile
from unittest import TestCase

import numpy as np

from errors import ConfigValidationError
from experiment_config import (
    ExperimentConfig,
    Mode,
    load_config,
    parse_config,
    render,
    validate_document,
    with_defaults,
)
from lindblad import LindbladGenerator
from redfield import RedfieldGenerator
from thermostat import ThermostatKind
from utils import derive_seed

CONFIG_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "config")

EQUILIBRIUM = {
    "mode": "equilibrium",
    "seed": 5,
    "beads": [1, 4],
    "system": {
        "n_particles": 2,
        "masses": 1.0,
        "dimension": 1,
        "box_length": 10.0,
        "periodic": False,
        "beta": 1.0,
        "positions": [[0.0], [1.0]],
    },
    "potentials": [{"kind": "harmonic_bond", "members": [0, 1], "params": {"k": 1.0, "r0": 1.0}}],
}

GRADIENT = {
    "mode": "npi_gradient",
    "beads": [1, 16, 32, 64],
    "chain": {"n_middle": 4},
    "branches": {"n_branches": 4, "spacing_steps": 100},
    "sampling": {"n_steps": 400},
    "perturbation": {"kind": "thermal_gradient", "t_hot": 1.1, "t_cold": 0.9},
}


def errors_of(document):
    return validate_document(document)


class TestValidation(TestCase):
    def test_shipped_configs_are_valid(self):
        names = sorted(name for name in os.listdir(CONFIG_DIR) if name.endswith(".json"))
        self.assertEqual(len(names), 5)
        for name in names:
            with self.subTest(config=name):
                config = load_config(os.path.join(CONFIG_DIR, name))
                self.assertEqual(config.mode, Mode(name[: -len(".json")]))

    def test_valid_documents(self):
        self.assertEqual(errors_of(EQUILIBRIUM), [])
        self.assertEqual(errors_of(GRADIENT), [])

    def test_three_independent_faults_three_errors(self):
        document = copy.deepcopy(EQUILIBRIUM)
        document["sytem"] = {}
        document["seed"] = -3
        document["potentials"][0]["members"] = [0, 5]

        errors = errors_of(document)

        self.assertEqual(len(errors), 3, errors)
        self.assertIn("config: unknown key 'sytem' (did you mean 'system'?)", errors)
        self.assertTrue(any(error.startswith("seed:") for error in errors))
        self.assertIn("potentials[0].members: [5] outside 0..1", errors)

    def test_unknown_potential_parameter(self):
        document = copy.deepcopy(EQUILIBRIUM)
        document["potentials"][0]["params"] = {"kk": 1.0, "r0": 1.0}

        errors = errors_of(document)

        self.assertIn("potentials[0].params: unknown key 'kk' (did you mean 'k'?)", errors)
        self.assertIn("potentials[0].params: missing 'k'", errors)

    def test_cold_bath_hotter_than_hot_bath(self):
        document = copy.deepcopy(GRADIENT)
        document["perturbation"].update({"t_hot": 0.9, "t_cold": 1.1})

        errors = errors_of(document)

        self.assertEqual(len(errors), 1)
        self.assertIn("t_cold (1.1) exceeds t_hot (0.9)", errors[0])

    def test_equal_baths_allowed(self):
        document = copy.deepcopy(GRADIENT)
        document["perturbation"].update({"t_hot": 1.0, "t_cold": 1.0})

        self.assertEqual(errors_of(document), [])

    def test_thermal_gradient_rejected_in_equilibrium_mode(self):
        document = copy.deepcopy(EQUILIBRIUM)
        document["sampling"] = {"n_steps": 100}
        document["branches"] = {"n_branches": 2, "spacing_steps": 10}
        document["perturbation"] = {"kind": "thermal_gradient", "t_hot": 1.1, "t_cold": 0.9}

        errors = errors_of(document)

        self.assertEqual(errors, ["perturbation: thermal_gradient needs a region layout; use mode npi_gradient"])
        with self.assertRaises(ConfigValidationError):
            parse_config(json.dumps(document))

    def test_gradient_needs_one_system(self):
        document = copy.deepcopy(GRADIENT)
        document.pop("chain")

        self.assertEqual(errors_of(document), ["config: npi_gradient needs exactly one of the sections 'chain' or 'system'"])

    def test_branches_must_fit_in_run(self):
        document = copy.deepcopy(GRADIENT)
        document["sampling"]["n_steps"] = 399

        errors = errors_of(document)

        self.assertEqual(len(errors), 1)
        self.assertIn("cannot supply 4 branches", errors[0])

    def test_missing_section_and_wrong_type(self):
        errors = errors_of({"mode": "lindblad", "generator": {"hamiltonian": "sigma_z"}, "evolution": []})

        self.assertIn("config: missing required section 'initial_density' for mode lindblad", errors)
        self.assertTrue(any(error.startswith("evolution:") for error in errors))

    def test_operator_and_density_checks(self):
        document = {
            "mode": "lindblad",
            "generator": {"hamiltonian": "sigma_q", "jumps": [{"operator": "sigma_minus", "rate": 1.0}]},
            "initial_density": {"state": "gibbs"},
        }

        errors = errors_of(document)

        self.assertEqual(len(errors), 2, errors)
        self.assertTrue(any("unknown operator preset 'sigma_q'" in error for error in errors))
        self.assertTrue(any("'gibbs' needs 'beta'" in error for error in errors))

    def test_bad_observable(self):
        document = copy.deepcopy(EQUILIBRIUM)
        document["sampling"] = {"observables": ["entropy"]}

        errors = errors_of(document)

        self.assertEqual(len(errors), 1)
        self.assertIn("unknown observable 'entropy'", errors[0])

    def test_not_an_object(self):
        self.assertEqual(errors_of([1, 2]), ["config: top level must be a JSON object"])

    def test_parse_collects_errors(self):
        with self.assertRaises(ConfigValidationError) as context:
            parse_config(json.dumps({"mode": "redfield", "seed": "x", "colour": 1}))

        self.assertGreaterEqual(len(context.exception.errors), 3)
        with self.assertRaises(ConfigValidationError):
            parse_config("{not json")

    def test_unused_section_warns(self):
        document = copy.deepcopy(EQUILIBRIUM)
        document["evolution"] = {"dt": 0.1}

        with self.assertLogs("experiment_config", level="WARNING"):
            parse_config(json.dumps(document))


class TestExperimentConfig(TestCase):
    def test_render_round_trip(self):
        config = parse_config(json.dumps(GRADIENT))

        self.assertEqual(parse_config(render(config)), config)
        self.assertEqual(render(parse_config(render(config))), render(config))

    def test_defaults_filled(self):
        config = parse_config(json.dumps(EQUILIBRIUM))

        self.assertEqual(config.workers, 1)
        self.assertEqual(config.output_dir, "runs")
        self.assertEqual(config.section("thermostat"), {"kind": "pile_l", "tau": 1.0})
        self.assertEqual(config.section("sampling")["dt"], 0.05)
        self.assertFalse(config.has("branches"))

        gradient = parse_config(json.dumps({**GRADIENT, "chain": {}}))
        self.assertEqual(gradient.section("chain")["n_middle"], 80)
        self.assertEqual(gradient.section("profile")["n_bins"], 20)

    def test_sweep_derives_seeds_per_p(self):
        config = parse_config(json.dumps({**GRADIENT, "seed": 12}))

        sweep = config.sweep()

        self.assertEqual([n_beads for n_beads, _ in sweep], [1, 16, 32, 64])
        self.assertEqual(sweep[2][1], derive_seed(12, 32))
        self.assertEqual(len({seed for _, seed in sweep}), 4)

    def test_hashes(self):
        config = parse_config(json.dumps(GRADIENT))
        reseeded = config.with_overrides(seed=99, output_dir="elsewhere", workers=3)

        self.assertEqual(reseeded.seed, 99)
        self.assertEqual(reseeded.workers, 3)
        self.assertNotEqual(reseeded.config_hash(), config.config_hash())
        self.assertEqual(reseeded.physics_hash(), config.physics_hash())

        hotter = copy.deepcopy(GRADIENT)
        hotter["perturbation"]["t_hot"] = 1.3
        self.assertNotEqual(parse_config(json.dumps(hotter)).physics_hash(), config.physics_hash())

    def test_overrides_revalidated(self):
        with self.assertRaises(ConfigValidationError):
            parse_config(json.dumps(GRADIENT)).with_overrides(workers=0)

    def test_builders(self):
        config = parse_config(json.dumps(GRADIENT))

        setup = config.chain_setup()
        self.assertEqual(setup.spec.n_particles, 16)
        self.assertEqual(config.thermostat().kind, ThermostatKind.PILE_L)
        plan = config.branch_plan(7, config.perturbation(setup.layout))
        self.assertEqual(plan.n_branches, 4)
        self.assertEqual(plan.perturbation.t_hot, 1.1)

    def test_system_builders(self):
        config = parse_config(json.dumps(EQUILIBRIUM))

        spec = config.system_spec()
        self.assertEqual(spec.n_particles, 2)
        self.assertEqual(len(spec.topology), 1)
        self.assertTrue(np.allclose(config.positions(spec), [[0.0], [1.0]]))

    def test_quantum_builders(self):
        lindblad = parse_config(
            json.dumps({"mode": "lindblad", "generator": {"thermal_qubit": {"omega": 1.0, "beta": 2.0, "gamma": 0.5}},
                        "initial_density": {"state": "gibbs", "beta": 2.0}})
        )
        gen = lindblad.lindblad_generator()
        self.assertIsInstance(gen, LindbladGenerator)
        self.assertTrue(np.allclose(gen.rhs(lindblad.initial_density(gen.hamiltonian)), 0.0, atol=1e-12))

        redfield = load_config(os.path.join(CONFIG_DIR, "redfield.json"))
        gen, rho0 = redfield.redfield_generator()
        self.assertIsInstance(gen, RedfieldGenerator)
        self.assertAlmostEqual(rho0.entries[0, 0].real, 0.25)

    def test_with_defaults_keeps_wrong_types(self):
        merged = with_defaults({"mode": "lindblad", "evolution": [1]})

        self.assertEqual(merged["evolution"], [1])

    def test_load_from_file(self):
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, "config.json")
            with open(path, "w") as fh:
                json.dump(EQUILIBRIUM, fh)

            self.assertEqual(load_config(path).beads, [1, 4])
