import numpy as np

from errors import DomainError
from force_field import ForceField
from potentials.base_potential import PotentialKind, PotentialTerm
from regions import RegionLayout
from system import SystemSpec


class ChainSetup:
    """Everything a thermal-gradient run needs for the periodic 1D chain."""

    def __init__(self, spec: SystemSpec, field: ForceField, layout: RegionLayout, positions: np.ndarray):
        self.spec = spec
        self.field = field
        self.layout = layout
        self.positions = positions

    def __repr__(self):
        return f"ChainSetup[{self.spec}, {self.layout}]"


def build_chain(
    n_middle: int = 80,
    spacing: float = 1.0,
    mass: float = 1.0,
    beta: float = 1.0,
    hbar: float = 1.0,
    morse_depth: float = 4.0,
    morse_a: float = 1.2,
    lj_epsilon: float = 0.1,
    lj_sigma: float = None,
    lj_cutoff: float = None,
    hot_fraction: float = 0.5,
) -> ChainSetup:
    """
    Periodic 1D chain of equal masses: Morse bonds between neighbours, LJ
    between next-nearest neighbours (minimum at twice the spacing unless
    lj_sigma is given). Each middle region holds n_middle particles, the cold
    region as many and each hot half hot_fraction of that.
    """
    n_particles = round((3.0 + 2.0 * hot_fraction) * n_middle)
    if n_middle < 2 or n_particles < 5:
        raise DomainError(f"chain needs n_middle >= 2 and at least 5 particles, got {n_particles}")

    box_length = n_particles * spacing
    lj_sigma = 2.0 * spacing * 2.0 ** (-1.0 / 6.0) if lj_sigma is None else lj_sigma
    lj_cutoff = 3.0 * spacing if lj_cutoff is None else lj_cutoff

    topology = []
    for i in range(n_particles):
        topology.append(
            PotentialTerm(
                PotentialKind.MORSE,
                (i, (i + 1) % n_particles),
                D=morse_depth,
                a=morse_a,
                r0=spacing,
            )
        )
    for i in range(n_particles):
        topology.append(
            PotentialTerm(
                PotentialKind.LENNARD_JONES,
                (i, (i + 2) % n_particles),
                epsilon=lj_epsilon,
                sigma=lj_sigma,
                cutoff=lj_cutoff,
            )
        )

    spec = SystemSpec(
        n_particles=n_particles,
        masses=mass,
        dimension=1,
        box_length=box_length,
        periodic=True,
        beta=beta,
        hbar=hbar,
        topology=topology,
    )
    layout = RegionLayout.symmetric(box_length, axis=0, hot_fraction=hot_fraction)
    # half-spacing offset keeps lattice sites off the region edges
    positions = ((np.arange(n_particles) + 0.5) * spacing).reshape(n_particles, 1)
    return ChainSetup(spec, ForceField.from_spec(spec), layout, positions)
