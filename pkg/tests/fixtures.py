import numpy as np

from force_field import ForceField
from potentials.base_potential import PotentialTerm
from random_stream import RandomStream
from ring_polymer import initial_state
from system import SystemSpec


def oscillator_spec(beta: float = 1.0, omega: float = 1.0, mass: float = 1.0) -> SystemSpec:
    well = PotentialTerm("external_well", (0,), k_ext=mass * omega**2, center=[0.0])
    return SystemSpec(
        n_particles=1, masses=mass, dimension=1, box_length=10.0, periodic=False, beta=beta, topology=[well]
    )


def oscillator_state(spec: SystemSpec, n_beads: int, seed: int = 0, position: float = 0.3):
    return initial_state(spec, n_beads, np.array([[position]]), RandomStream(seed))


def oscillator_field(spec: SystemSpec) -> ForceField:
    return ForceField.from_spec(spec)


def replica_spec(n_particles: int, beta: float = 1.0, omega: float = 1.0, mass: float = 1.0) -> SystemSpec:
    """n_particles independent copies of the 1D oscillator, sharing one well term."""
    well = PotentialTerm("external_well", tuple(range(n_particles)), k_ext=mass * omega**2, center=[0.0])
    return SystemSpec(
        n_particles=n_particles, masses=mass, dimension=1, box_length=10.0, periodic=False, beta=beta,
        topology=[well],
    )
