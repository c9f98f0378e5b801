import copy
import difflib
import json
import logging
from enum import Enum

import numpy as np
from jsonschema import Draft7Validator

from branch_plan import CUSTOM_FORCES, BranchMode, BranchPlan, PerturbationKind, PerturbationSpec
from chain import ChainSetup, build_chain
from density_matrix import DensityMatrix
from errors import ConfigurationError, ConfigValidationError
from force_field import ForceField
from lindblad import LindbladGenerator
from observables import resolve_observable
from potentials.base_potential import KIND_PARAMETERS, PotentialKind, PotentialTerm
from presets import EXCITED, GROUND, OPERATORS, matrix_from_pairs, resolve_operator
from redfield import RateTable, RedfieldGenerator, nonsecular_qubit_case
from regions import RegionLayout
from system import SystemSpec
from temperature_profile import ProfileMode
from thermostat import ThermostatKind, ThermostatSpec
from utils import content_hash, derive_seed

logger = logging.getLogger(__name__)


class Mode(Enum):
    EQUILIBRIUM = "equilibrium"
    OSCILLATOR_BENCHMARK = "oscillator_benchmark"
    NPI_GRADIENT = "npi_gradient"
    LINDBLAD = "lindblad"
    REDFIELD = "redfield"

    @classmethod
    def _missing_(cls, value):
        if isinstance(value, str):
            for mode in Mode:
                if value.lower() == mode.value.lower():
                    return mode
        return super()._missing_(value)


# modes that expand the beads list into one sub-run per P
SWEEP_MODES = (Mode.EQUILIBRIUM, Mode.OSCILLATOR_BENCHMARK, Mode.NPI_GRADIENT)

# sections that define the physics; runs differing here are not comparable
PHYSICS_SECTIONS = (
    "mode",
    "system",
    "potentials",
    "chain",
    "regions",
    "perturbation",
    "oscillator",
    "generator",
    "redfield",
)

DEFAULT_CONFIG = {
    "seed": 0,
    "output_dir": "runs",
    "beads": [1],
    "workers": 1,
}

SECTION_DEFAULTS = {
    "potentials": [],
    "thermostat": {"kind": "pile_l", "tau": 1.0},
    "sampling": {
        "dt": 0.05,
        "n_steps": 20000,
        "n_warmup": 1000,
        "sample_stride": 10,
        "observables": ["potential_energy"],
    },
    "branches": {
        "n_branches": 27,
        "spacing_steps": 200,
        "branch_length_steps": 2000,
        "dt": 0.05,
        "record_stride": 10,
        "mode": "fresh",
        "observables": ["potential_energy"],
        "production_fraction": 0.5,
        "thermostatted": False,
        "correlations": [],
    },
    "perturbation": {"kind": "none", "gamma": 1.0, "switch_on_step": 0, "force_params": {}},
    "regions": {"axis": 0, "hot_fraction": 0.5},
    "profile": {"n_bins": 20, "mode": "bead_kinetic", "steady_window": 20, "steady_tolerance": 0.02},
    "chain": {
        "n_middle": 80,
        "spacing": 1.0,
        "mass": 1.0,
        "beta": 1.0,
        "hbar": 1.0,
        "morse_depth": 4.0,
        "morse_a": 1.2,
        "lj_epsilon": 0.1,
        "hot_fraction": 0.5,
    },
    "oscillator": {
        "omega": 1.0,
        "mass": 1.0,
        "beta": 1.0,
        "hbar": 1.0,
        "tolerance_finite_p": 0.02,
        "tolerance_quantum": 0.03,
    },
    "generator": {"hbar": 1.0, "jumps": []},
    "redfield": {"alpha2": 1.0, "hbar": 1.0, "secular": True},
    "evolution": {"t_final": 5.0, "dt": 0.01, "record_every": 10, "tolerance": 1e-10},
}

# mode -> (required sections, sections always filled from defaults)
MODE_SECTIONS = {
    Mode.EQUILIBRIUM: (("system",), ("potentials", "thermostat", "sampling")),
    Mode.OSCILLATOR_BENCHMARK: ((), ("oscillator", "thermostat", "sampling")),
    Mode.NPI_GRADIENT: (("branches", "perturbation"), ("thermostat", "sampling", "profile")),
    Mode.LINDBLAD: (("generator", "initial_density"), ("evolution",)),
    Mode.REDFIELD: (("redfield",), ("evolution",)),
}


def _number(**bounds) -> dict:
    return {"type": "number", **bounds}


def _integer(**bounds) -> dict:
    return {"type": "integer", **bounds}


POSITIVE = _number(exclusiveMinimum=0)
NON_NEGATIVE = _number(minimum=0)
PAIR = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}
PAIR_MATRIX = {"type": "array", "minItems": 1, "items": {"type": "array", "minItems": 1, "items": PAIR}}
OPERATOR = {
    "oneOf": [
        {"type": "string"},
        {"type": "object", "required": ["preset"], "properties": {"preset": {"type": "string"}, "scale": _number()}},
        PAIR_MATRIX,
    ]
}
STRINGS = {"type": "array", "items": {"type": "string"}}
NUMBERS = {"type": "array", "items": {"type": "number"}}

SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "object",
    "required": ["mode"],
    "properties": {
        "mode": {"enum": [mode.value for mode in Mode]},
        "seed": _integer(minimum=0),
        "output_dir": {"type": "string", "minLength": 1},
        "beads": {"type": "array", "minItems": 1, "items": _integer(minimum=1)},
        "workers": _integer(minimum=1),
        "system": {
            "type": "object",
            "required": ["n_particles", "masses", "dimension", "box_length", "periodic", "beta"],
            "properties": {
                "n_particles": _integer(minimum=1),
                "masses": {"oneOf": [POSITIVE, {"type": "array", "items": POSITIVE}]},
                "dimension": {"enum": [1, 2, 3]},
                "box_length": {"oneOf": [POSITIVE, {"type": "array", "items": POSITIVE}]},
                "periodic": {"oneOf": [{"type": "boolean"}, {"type": "array", "items": {"type": "boolean"}}]},
                "beta": POSITIVE,
                "hbar": POSITIVE,
                "positions": {"type": "array", "items": NUMBERS},
            },
        },
        "potentials": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["kind", "members", "params"],
                "properties": {
                    "kind": {"enum": [kind.value for kind in PotentialKind]},
                    "members": {"type": "array", "minItems": 1, "items": _integer(minimum=0)},
                    "params": {"type": "object"},
                },
            },
        },
        "chain": {
            "type": "object",
            "properties": {
                "n_middle": _integer(minimum=2),
                "spacing": POSITIVE,
                "mass": POSITIVE,
                "beta": POSITIVE,
                "hbar": POSITIVE,
                "morse_depth": POSITIVE,
                "morse_a": POSITIVE,
                "lj_epsilon": NON_NEGATIVE,
                "lj_sigma": POSITIVE,
                "lj_cutoff": POSITIVE,
                "hot_fraction": POSITIVE,
            },
        },
        "thermostat": {
            "type": "object",
            "properties": {
                "kind": {"enum": ["none", "pile_l"]},
                "tau": POSITIVE,
                "target_T": POSITIVE,
            },
        },
        "sampling": {
            "type": "object",
            "properties": {
                "dt": POSITIVE,
                "n_steps": _integer(minimum=1),
                "n_warmup": _integer(minimum=0),
                "sample_stride": _integer(minimum=1),
                "observables": STRINGS,
            },
        },
        "branches": {
            "type": "object",
            "properties": {
                "n_branches": _integer(minimum=2),
                "spacing_steps": _integer(minimum=1),
                "branch_length_steps": _integer(minimum=1),
                "dt": POSITIVE,
                "record_stride": _integer(minimum=1),
                "mode": {"enum": [mode.value for mode in BranchMode]},
                "observables": STRINGS,
                "production_fraction": _number(exclusiveMinimum=0, maximum=1),
                "thermostatted": {"type": "boolean"},
                "correlations": {"type": "array", "items": {**STRINGS, "minItems": 2, "maxItems": 2}},
            },
        },
        "perturbation": {
            "type": "object",
            "properties": {
                "kind": {"enum": [kind.value for kind in PerturbationKind]},
                "t_hot": POSITIVE,
                "t_cold": POSITIVE,
                "gamma": NON_NEGATIVE,
                "force": {"type": "string"},
                "force_params": {"type": "object"},
                "switch_on_step": _integer(minimum=0),
            },
        },
        "regions": {
            "type": "object",
            "properties": {
                "axis": _integer(minimum=0, maximum=2),
                "hot_fraction": POSITIVE,
                "edges": NUMBERS,
                "roles": {"type": "array", "items": {"enum": ["hot", "middle", "cold"]}},
            },
        },
        "profile": {
            "type": "object",
            "properties": {
                "n_bins": _integer(minimum=1),
                "mode": {"enum": [mode.value for mode in ProfileMode]},
                "steady_window": _integer(minimum=1),
                "steady_tolerance": POSITIVE,
            },
        },
        "oscillator": {
            "type": "object",
            "properties": {
                "omega": POSITIVE,
                "mass": POSITIVE,
                "beta": POSITIVE,
                "hbar": POSITIVE,
                "tolerance_finite_p": POSITIVE,
                "tolerance_quantum": POSITIVE,
            },
        },
        "generator": {
            "type": "object",
            "properties": {
                "hamiltonian": OPERATOR,
                "hbar": POSITIVE,
                "jumps": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "required": ["operator", "rate"],
                        "properties": {"operator": OPERATOR, "rate": NON_NEGATIVE},
                    },
                },
                "thermal_qubit": {
                    "type": "object",
                    "required": ["omega", "beta", "gamma"],
                    "properties": {"omega": POSITIVE, "beta": POSITIVE, "gamma": NON_NEGATIVE},
                },
            },
        },
        "redfield": {
            "type": "object",
            "properties": {
                "hamiltonian": OPERATOR,
                "alpha2": NON_NEGATIVE,
                "hbar": POSITIVE,
                "secular": {"type": "boolean"},
                "case": {"enum": ["nonsecular_qubit"]},
                "omega0": POSITIVE,
                "gamma": NON_NEGATIVE,
                "couplings": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "required": ["operator", "rates"],
                        "properties": {
                            "operator": OPERATOR,
                            "rates": {
                                "type": "array",
                                "items": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 3},
                            },
                        },
                    },
                },
                "scan": {
                    "type": "object",
                    "required": ["angles", "thetas"],
                    "properties": {
                        "angles": NUMBERS,
                        "thetas": NUMBERS,
                        "phis": NUMBERS,
                        "t_final": POSITIVE,
                        "dt": POSITIVE,
                    },
                },
            },
        },
        "initial_density": {
            "type": "object",
            "properties": {
                "state": {"enum": ["excited", "ground", "maximally_mixed", "gibbs"]},
                "beta": POSITIVE,
                "pure": {"type": "array", "minItems": 1, "items": PAIR},
                "matrix": PAIR_MATRIX,
            },
        },
        "evolution": {
            "type": "object",
            "properties": {
                "t_final": NON_NEGATIVE,
                "dt": POSITIVE,
                "record_every": _integer(minimum=1),
                "tolerance": POSITIVE,
            },
        },
    },
}

# keys the walker accepts per section, list sections mapped through their items
KNOWN_KEYS = {
    section: sorted(properties.get("properties", properties.get("items", {}).get("properties", {})))
    for section, properties in SCHEMA["properties"].items()
}
NESTED_KEYS = {
    ("generator", "jumps"): ["operator", "rate"],
    ("generator", "thermal_qubit"): ["beta", "gamma", "omega"],
    ("redfield", "couplings"): ["operator", "rates"],
    ("redfield", "scan"): ["angles", "dt", "phis", "t_final", "thetas"],
}


def _unknown(path: str, key: str, known) -> str:
    nearest = difflib.get_close_matches(key, known, n=1)
    hint = f" (did you mean '{nearest[0]}'?)" if nearest else f" (valid: {', '.join(known)})"
    return f"{path}: unknown key '{key}'{hint}"


def unknown_key_errors(document: dict) -> list[str]:
    errors = []
    for key, value in document.items():
        if key not in SCHEMA["properties"]:
            errors.append(_unknown("config", key, sorted(SCHEMA["properties"])))
            continue

        known = KNOWN_KEYS[key]
        if not known:
            continue
        entries = value if isinstance(value, list) else [value]
        for index, entry in enumerate(entries):
            if not isinstance(entry, dict):
                continue
            path = f"{key}[{index}]" if isinstance(value, list) else key
            for name, inner in entry.items():
                if name not in known:
                    errors.append(_unknown(path, name, known))
                    continue
                nested = NESTED_KEYS.get((key, name))
                if nested is None:
                    continue
                for position, item in enumerate(inner if isinstance(inner, list) else [inner]):
                    if not isinstance(item, dict):
                        continue
                    for field in item:
                        if field not in nested:
                            errors.append(_unknown(f"{path}.{name}[{position}]", field, nested))
    return errors


def schema_errors(document: dict) -> list[str]:
    validator = Draft7Validator(SCHEMA)
    errors = sorted(validator.iter_errors(document), key=lambda error: [str(part) for part in error.path])
    return [
        f"{'.'.join(str(part) for part in error.path) or 'config'}: {error.message}"
        for error in errors
    ]


def _is_number(value) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _operator_errors(path: str, value) -> list[str]:
    if isinstance(value, str) and value not in OPERATORS:
        return [f"{path}: unknown operator preset '{value}', known: {sorted(OPERATORS)}"]
    if isinstance(value, dict) and isinstance(value.get("preset"), str) and value["preset"] not in OPERATORS:
        return [f"{path}.preset: unknown operator preset '{value['preset']}', known: {sorted(OPERATORS)}"]
    return []


def _observable_errors(path: str, names) -> list[str]:
    errors = []
    for name in names if isinstance(names, list) else []:
        if not isinstance(name, str):
            continue
        try:
            resolve_observable(name)
        except ConfigurationError as e:
            errors.append(f"{path}: {e}")
    return errors


def semantic_errors(document: dict) -> list[str]:
    """Cross-field invariants the schema cannot express; values of the wrong type are skipped."""
    try:
        mode = Mode(document.get("mode"))
    except ValueError:
        return []

    errors = []
    required, _ = MODE_SECTIONS[mode]
    for section in required:
        if section not in document:
            errors.append(f"config: missing required section '{section}' for mode {mode.value}")

    if mode == Mode.NPI_GRADIENT and ("chain" in document) == ("system" in document):
        errors.append("config: npi_gradient needs exactly one of the sections 'chain' or 'system'")
    if mode == Mode.REDFIELD:
        redfield = document.get("redfield", {})
        if isinstance(redfield, dict):
            if "case" not in redfield and "initial_density" not in document:
                errors.append("config: missing required section 'initial_density' for mode redfield")
            if "case" not in redfield and ("hamiltonian" not in redfield or "couplings" not in redfield):
                errors.append("redfield: needs 'hamiltonian' and 'couplings' unless a 'case' is named")

    system = document.get("system")
    if isinstance(system, dict):
        n_particles = system.get("n_particles")
        dimension = system.get("dimension")
        potentials = document.get("potentials", [])
        for index, term in enumerate(potentials if isinstance(potentials, list) else []):
            if not isinstance(term, dict):
                continue
            members = term.get("members", [])
            if isinstance(n_particles, int) and isinstance(members, list):
                outside = [m for m in members if isinstance(m, int) and not 0 <= m < n_particles]
                if outside:
                    errors.append(f"potentials[{index}].members: {outside} outside 0..{n_particles - 1}")
            params = term.get("params")
            try:
                expected = KIND_PARAMETERS[PotentialKind(term.get("kind"))]
            except ValueError:
                continue
            if isinstance(params, dict):
                for name in params:
                    if name not in expected:
                        errors.append(_unknown(f"potentials[{index}].params", name, list(expected)))
                for name in expected:
                    if name not in params:
                        errors.append(f"potentials[{index}].params: missing '{name}'")
        positions = system.get("positions")
        if isinstance(positions, list) and isinstance(n_particles, int) and isinstance(dimension, int):
            if np.shape(positions) != (n_particles, dimension):
                errors.append(
                    f"system.positions: shape {np.shape(positions)} does not match ({n_particles}, {dimension})"
                )

    perturbation = document.get("perturbation")
    if isinstance(perturbation, dict):
        kind = perturbation.get("kind", "none")
        t_hot, t_cold = perturbation.get("t_hot"), perturbation.get("t_cold")
        if kind == PerturbationKind.THERMAL_GRADIENT.value:
            if mode == Mode.EQUILIBRIUM:
                errors.append("perturbation: thermal_gradient needs a region layout; use mode npi_gradient")
            if t_hot is None or t_cold is None:
                errors.append("perturbation: thermal_gradient needs both 't_hot' and 't_cold'")
            elif _is_number(t_hot) and _is_number(t_cold) and t_cold > t_hot:
                errors.append(
                    f"perturbation: t_cold ({t_cold}) exceeds t_hot ({t_hot}); a thermal gradient needs t_hot >= t_cold"
                )
        if kind == PerturbationKind.CUSTOM_FORCE.value and perturbation.get("force") not in CUSTOM_FORCES:
            errors.append(
                f"perturbation.force: unknown custom force '{perturbation.get('force')}', known: {sorted(CUSTOM_FORCES)}"
            )

    sampling = document.get("sampling")
    sampling = sampling if isinstance(sampling, dict) else {}
    branches = document.get("branches")
    errors += _observable_errors("sampling.observables", sampling.get("observables"))
    if isinstance(branches, dict):
        errors += _observable_errors("branches.observables", branches.get("observables"))
        observed = branches.get("observables", SECTION_DEFAULTS["branches"]["observables"])
        observed = {name for name in observed if isinstance(name, str)} if isinstance(observed, list) else set()
        correlations = branches.get("correlations", [])
        for pair in correlations if isinstance(correlations, list) else []:
            if not (isinstance(pair, list) and all(isinstance(name, str) for name in pair)):
                continue
            if not set(pair) <= observed:
                errors.append(f"branches.correlations: {pair} uses observables not listed in branches.observables")
        n_steps = sampling.get("n_steps", SECTION_DEFAULTS["sampling"]["n_steps"])
        n_branches = branches.get("n_branches", SECTION_DEFAULTS["branches"]["n_branches"])
        spacing = branches.get("spacing_steps", SECTION_DEFAULTS["branches"]["spacing_steps"])
        if all(isinstance(value, int) for value in (n_steps, n_branches, spacing)) and n_steps < n_branches * spacing:
            errors.append(
                f"sampling.n_steps: {n_steps} steps cannot supply {n_branches} branches spaced {spacing} steps apart"
            )

    regions = document.get("regions")
    if isinstance(regions, dict) and ("edges" in regions) != ("roles" in regions):
        errors.append("regions: 'edges' and 'roles' must be given together")

    generator = document.get("generator")
    if isinstance(generator, dict):
        if ("hamiltonian" in generator) == ("thermal_qubit" in generator):
            errors.append("generator: give exactly one of 'hamiltonian' or 'thermal_qubit'")
        errors += _operator_errors("generator.hamiltonian", generator.get("hamiltonian"))
        for index, jump in enumerate(generator.get("jumps", []) if isinstance(generator.get("jumps"), list) else []):
            if isinstance(jump, dict):
                errors += _operator_errors(f"generator.jumps[{index}].operator", jump.get("operator"))

    redfield = document.get("redfield")
    if isinstance(redfield, dict):
        errors += _operator_errors("redfield.hamiltonian", redfield.get("hamiltonian"))
        couplings = redfield.get("couplings", [])
        for index, coupling in enumerate(couplings if isinstance(couplings, list) else []):
            if isinstance(coupling, dict):
                errors += _operator_errors(f"redfield.couplings[{index}].operator", coupling.get("operator"))

    density = document.get("initial_density")
    if isinstance(density, dict):
        given = [key for key in ("state", "pure", "matrix") if key in density]
        if len(given) != 1:
            errors.append("initial_density: give exactly one of 'state', 'pure' or 'matrix'")
        if density.get("state") == "gibbs" and "beta" not in density:
            errors.append("initial_density: state 'gibbs' needs 'beta'")

    return errors


def validate_document(document) -> list[str]:
    """Every diagnostic for one config document, in a stable order."""
    if not isinstance(document, dict):
        return ["config: top level must be a JSON object"]
    return unknown_key_errors(document) + schema_errors(with_defaults(document)) + semantic_errors(document)


def with_defaults(document: dict) -> dict:
    merged = copy.deepcopy(DEFAULT_CONFIG)
    merged.update(copy.deepcopy(document))
    try:
        mode = Mode(document.get("mode"))
    except ValueError:
        return merged

    _, defaulted = MODE_SECTIONS[mode]
    present = [section for section in SECTION_DEFAULTS if section in document]
    if mode == Mode.NPI_GRADIENT:
        defaulted = defaulted + (("regions", "potentials") if "system" in document else ())
    for section in list(defaulted) + present:
        defaults = SECTION_DEFAULTS[section]
        given = merged.get(section)
        if isinstance(defaults, dict) and (given is None or isinstance(given, dict)):
            merged[section] = {**copy.deepcopy(defaults), **(given or {})}
        elif given is None:
            merged[section] = copy.deepcopy(defaults)
    return merged


class ExperimentConfig:
    """A validated experiment document with every default filled in."""

    def __init__(self, document: dict):
        assert isinstance(document, dict)

        self.logger = logging.getLogger(self.__class__.__name__)
        self.document = document

    @property
    def mode(self) -> Mode:
        return Mode(self.document["mode"])

    @property
    def seed(self) -> int:
        return int(self.document["seed"])

    @property
    def output_dir(self) -> str:
        return self.document["output_dir"]

    @property
    def workers(self) -> int:
        return int(self.document["workers"])

    @property
    def beads(self) -> list[int]:
        return [int(value) for value in self.document["beads"]]

    def section(self, name: str):
        return self.document.get(name)

    def has(self, name: str) -> bool:
        return name in self.document

    def sweep(self) -> list[tuple[int, int]]:
        """Ordered (P, seed) sub-runs; seed_k = hash(seed, P_k)."""
        if self.mode not in SWEEP_MODES:
            return [(1, self.seed)]
        return [(n_beads, derive_seed(self.seed, n_beads)) for n_beads in self.beads]

    def config_hash(self) -> str:
        return content_hash(self.document).hex()

    def physics_hash(self) -> str:
        return content_hash({key: self.document.get(key) for key in PHYSICS_SECTIONS}).hex()

    def with_overrides(self, seed: int = None, output_dir: str = None, workers: int = None) -> "ExperimentConfig":
        document = copy.deepcopy(self.document)
        for key, value in (("seed", seed), ("output_dir", output_dir), ("workers", workers)):
            if value is not None:
                document[key] = value
        errors = validate_document(document)
        if errors:
            raise ConfigValidationError(errors)
        return ExperimentConfig(document)

    # builders

    def system_spec(self, beta: float = None) -> SystemSpec:
        system = dict(self.document["system"])
        if beta is not None:
            system["beta"] = beta
        system["topology"] = self.document.get("potentials", [])
        return SystemSpec.from_dict(system)

    def positions(self, spec: SystemSpec) -> np.ndarray:
        positions = self.document["system"].get("positions")
        if positions is None:
            return np.zeros((spec.n_particles, spec.dimension))
        return np.asarray(positions, dtype=float)

    def oscillator_spec(self) -> SystemSpec:
        oscillator = self.document["oscillator"]
        well = PotentialTerm(
            PotentialKind.EXTERNAL_WELL,
            (0,),
            k_ext=oscillator["mass"] * oscillator["omega"] ** 2,
            center=[0.0],
        )
        return SystemSpec(
            n_particles=1,
            masses=oscillator["mass"],
            dimension=1,
            box_length=1.0,
            periodic=False,
            beta=oscillator["beta"],
            hbar=oscillator["hbar"],
            topology=[well],
        )

    def chain_setup(self) -> ChainSetup:
        """The periodic chain preset, or a declared system tiled by the regions section."""
        if self.has("chain"):
            return build_chain(**self.document["chain"])

        spec = self.system_spec()
        regions = self.document["regions"]
        axis = int(regions["axis"])
        if axis >= spec.dimension:
            raise ConfigurationError(f"regions.axis {axis} outside dimension {spec.dimension}")
        if not spec.periodic[axis]:
            raise ConfigurationError(f"regions.axis {axis} must be periodic")
        box_length = spec.box_length[axis]
        if "edges" in regions:
            layout = RegionLayout(axis, regions["edges"], regions["roles"], box_length)
        else:
            layout = RegionLayout.symmetric(box_length, axis, regions["hot_fraction"])
        return ChainSetup(spec, ForceField.from_spec(spec), layout, self.positions(spec))

    def thermostat(self) -> ThermostatSpec:
        thermostat = self.document["thermostat"]
        match ThermostatKind(thermostat["kind"]):
            case ThermostatKind.NONE:
                return ThermostatSpec.none()
            case ThermostatKind.PILE_L:
                return ThermostatSpec.pile_l(thermostat["tau"], thermostat.get("target_T"))
            case _:
                raise ConfigurationError(f"thermostat kind '{thermostat['kind']}' is not configurable")

    def perturbation(self, layout: RegionLayout = None) -> PerturbationSpec:
        perturbation = self.document.get("perturbation", SECTION_DEFAULTS["perturbation"])
        return PerturbationSpec(
            kind=perturbation["kind"],
            layout=layout,
            t_hot=perturbation.get("t_hot"),
            t_cold=perturbation.get("t_cold"),
            gamma=perturbation.get("gamma", 1.0),
            force=perturbation.get("force"),
            force_params=perturbation.get("force_params"),
            switch_on_step=perturbation.get("switch_on_step", 0),
        )

    def branch_plan(self, seed: int, perturbation: PerturbationSpec) -> BranchPlan:
        branches = self.document["branches"]
        return BranchPlan(
            n_branches=branches["n_branches"],
            spacing_steps=branches["spacing_steps"],
            branch_length_steps=branches["branch_length_steps"],
            branch_dt=branches["dt"],
            perturbation=perturbation,
            record_stride=branches["record_stride"],
            mode=branches["mode"],
            seed=seed,
            thermostat=self.thermostat() if branches["thermostatted"] else None,
        )

    def lindblad_generator(self) -> LindbladGenerator:
        generator = self.document["generator"]
        if "thermal_qubit" in generator:
            qubit = generator["thermal_qubit"]
            return LindbladGenerator.thermal_qubit(qubit["omega"], qubit["beta"], qubit["gamma"], generator["hbar"])
        return LindbladGenerator(
            resolve_operator(generator["hamiltonian"]),
            [(resolve_operator(jump["operator"]), jump["rate"]) for jump in generator["jumps"]],
            generator["hbar"],
        )

    def redfield_generator(self):
        """(RedfieldGenerator, initial density or None when the density section decides)."""
        redfield = self.document["redfield"]
        if "case" in redfield:
            return nonsecular_qubit_case(
                redfield.get("omega0", 1.0), redfield.get("gamma", 1.0), redfield["alpha2"]
            )
        couplings = [
            (
                resolve_operator(coupling["operator"]),
                RateTable([(row[0], complex(row[1], row[2] if len(row) > 2 else 0.0)) for row in coupling["rates"]]),
            )
            for coupling in redfield["couplings"]
        ]
        gen = RedfieldGenerator(
            resolve_operator(redfield["hamiltonian"]), couplings, redfield["alpha2"], redfield["hbar"]
        )
        return gen, None

    def initial_density(self, hamiltonian: np.ndarray) -> DensityMatrix:
        density = self.document["initial_density"]
        if "pure" in density:
            pairs = np.asarray(density["pure"], dtype=float)
            return DensityMatrix.pure(pairs[:, 0] + 1j * pairs[:, 1])
        if "matrix" in density:
            return DensityMatrix(matrix_from_pairs(density["matrix"]))
        match density["state"]:
            case "excited":
                return DensityMatrix.pure(EXCITED)
            case "ground":
                return DensityMatrix.pure(GROUND)
            case "maximally_mixed":
                return DensityMatrix.maximally_mixed(hamiltonian.shape[0])
            case "gibbs":
                return DensityMatrix.gibbs(hamiltonian, density["beta"])

    def __eq__(self, other):
        if isinstance(other, ExperimentConfig):
            return self.document == other.document
        return False

    def __repr__(self):
        return f"ExperimentConfig[mode={self.mode.value}, seed={self.seed}, beads={self.beads}]"


def parse_config(text: str) -> ExperimentConfig:
    """
    Parses and validates a JSON experiment document. Every fault found is
    collected into one ConfigValidationError.
    """
    try:
        document = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigValidationError([f"config: not valid JSON ({e.msg} at line {e.lineno}, column {e.colno})"])

    errors = validate_document(document)
    if errors:
        raise ConfigValidationError(errors)

    config = ExperimentConfig(with_defaults(document))
    for section in document:
        if section in SECTION_DEFAULTS and section not in _used_sections(config):
            logger.warning(f"Section '{section}' is not used in mode {config.mode.value}")
    return config


def _used_sections(config: ExperimentConfig) -> set:
    required, defaulted = MODE_SECTIONS[config.mode]
    used = set(required) | set(defaulted)
    match config.mode:
        case Mode.EQUILIBRIUM:
            used |= {"branches", "perturbation"}
        case Mode.NPI_GRADIENT:
            used |= {"chain", "system", "potentials", "regions"}
        case Mode.REDFIELD:
            used |= {"initial_density"}
    return used


def load_config(path: str) -> ExperimentConfig:
    with open(path) as fh:
        return parse_config(fh.read())


def render(config: ExperimentConfig) -> str:
    """Canonical JSON; parse_config(render(config)) == config."""
    return json.dumps(config.document, sort_keys=True, indent=2) + "\n"
