import logging
from collections import defaultdict

import numpy as np

from metrics import force_evaluations_counter
from potentials.angle import HarmonicAngle
from potentials.base_potential import BasePotential, PotentialKind, PotentialTerm
from potentials.bonds import HarmonicBond, MorseBond
from potentials.external_well import ExternalWell
from potentials.lennard_jones import LennardJones
from potentials.pair_potential import CentralPairPotential
from ring_polymer import RingPolymerState, next_bead, omega_p
from system import SystemSpec


def build_evaluator(kind: PotentialKind, terms, box_length, periodic) -> BasePotential:
    match kind:
        case PotentialKind.HARMONIC_BOND:
            return HarmonicBond(terms, box_length, periodic)
        case PotentialKind.MORSE:
            return MorseBond(terms, box_length, periodic)
        case PotentialKind.LENNARD_JONES:
            return LennardJones(terms, box_length, periodic)
        case PotentialKind.HARMONIC_ANGLE:
            return HarmonicAngle(terms, box_length, periodic)
        case PotentialKind.EXTERNAL_WELL:
            return ExternalWell(terms, box_length, periodic)
        case _:
            raise Exception(f"Invalid potential kind {kind}")


class ForceField:
    """
    Total interaction energy of one bead slice and its exact negative gradient.

    All arrays are evaluated slice-wise: positions (N, B, d) hold B bead slices
    and only same-index beads of different particles interact. Immutable after
    construction, so one instance is shared by every branch worker.

    External fields (perturbation forces) are callables
    positions (N, B, d) -> (energy (B,), forces (N, B, d)).
    """

    def __init__(self, terms: list[PotentialTerm], box_length, periodic, external_fields=()):
        self.logger = logging.getLogger(self.__class__.__name__)

        self.terms = tuple(terms)
        self.box_length = np.asarray(box_length, dtype=float)
        self.periodic = np.asarray(periodic, dtype=bool)
        self.external_fields = tuple(external_fields)

        grouped = defaultdict(list)
        for term in self.terms:
            assert isinstance(term, PotentialTerm)
            grouped[term.kind].append(term)

        self.evaluators = [
            build_evaluator(kind, grouped[kind], self.box_length, self.periodic)
            for kind in PotentialKind
            if grouped[kind]
        ]

    @classmethod
    def from_spec(cls, spec: SystemSpec) -> "ForceField":
        return cls(spec.topology, spec.box_length, spec.periodic)

    def with_external(self, external_field) -> "ForceField":
        assert callable(external_field)
        return ForceField(
            self.terms,
            self.box_length,
            self.periodic,
            self.external_fields + (external_field,),
        )

    @property
    def has_angles(self) -> bool:
        return any(term.kind == PotentialKind.HARMONIC_ANGLE for term in self.terms)

    @property
    def has_external(self) -> bool:
        return bool(self.external_fields) or any(
            term.kind == PotentialKind.EXTERNAL_WELL for term in self.terms
        )

    def evaluate(self, positions: np.ndarray):
        """Returns (energy per slice (B,), forces (N, B, d))."""
        force_evaluations_counter.inc()

        energy = np.zeros(positions.shape[1])
        forces = np.zeros_like(positions)
        for evaluator in self.evaluators:
            slice_energy, slice_forces = evaluator.evaluate(positions)
            energy += slice_energy
            forces += slice_forces
        for external_field in self.external_fields:
            slice_energy, slice_forces = external_field(positions)
            energy += slice_energy
            forces += slice_forces
        return energy, forces

    def pair_terms(self, positions: np.ndarray):
        """Yields (i, j, r_ij, F on i, energy) for every central pair evaluator."""
        for evaluator in self.evaluators:
            if isinstance(evaluator, CentralPairPotential) and len(evaluator.terms) > 0:
                yield evaluator.pair_forces(positions)

    def particle_energies(self, positions: np.ndarray) -> np.ndarray:
        """Per-particle potential energy (N, B): pair energies split evenly, wells to their particle."""
        energies = np.zeros(positions.shape[:2])
        for i, j, _, _, energy in self.pair_terms(positions):
            np.add.at(energies, i, 0.5 * energy)
            np.add.at(energies, j, 0.5 * energy)
        for evaluator in self.evaluators:
            if isinstance(evaluator, ExternalWell):
                particles, energy = evaluator.particle_energies(positions)
                np.add.at(energies, particles, energy)
        return energies

    def __repr__(self):
        kinds = [evaluator.kind.value for evaluator in self.evaluators]
        return f"ForceField[kinds={kinds}, terms={len(self.terms)}, external={len(self.external_fields)}]"


def energy_bead_slice(field: ForceField, spec: SystemSpec, positions_at_bead_j) -> float:
    positions = np.asarray(positions_at_bead_j, dtype=float).reshape(spec.n_particles, 1, spec.dimension)
    energy, _ = field.evaluate(positions)
    return float(energy[0])


def forces_bead_slice(field: ForceField, spec: SystemSpec, positions_at_bead_j) -> np.ndarray:
    positions = np.asarray(positions_at_bead_j, dtype=float).reshape(spec.n_particles, 1, spec.dimension)
    _, forces = field.evaluate(positions)
    return forces[:, 0, :]


def spring_energy(spec: SystemSpec, state: RingPolymerState) -> float:
    """sum_j sum_i m_i omega_P^2 / 2 |x_i^(j+1) - x_i^(j)|^2 with cyclic closure."""
    n_beads = state.n_beads
    if n_beads == 1:
        return 0.0
    following = [next_bead(j, n_beads) for j in range(n_beads)]
    stretch = state.positions[:, following, :] - state.positions
    omega = omega_p(spec.beta, spec.hbar, n_beads)
    return float(0.5 * omega**2 * np.sum(spec.mass_array[:, None, None] * stretch**2))


def total_ring_potential(field: ForceField, spec: SystemSpec, state: RingPolymerState) -> float:
    energy, _ = field.evaluate(state.positions)
    return spring_energy(spec, state) + float(energy.sum()) / state.n_beads
