import numpy as np

from constants import LJ_OVERFLOW_THRESHOLD
from errors import SingularConfigurationError
from potentials.base_potential import PotentialKind
from potentials.pair_potential import CentralPairPotential


class LennardJones(CentralPairPotential):
    """
    Truncated and energy-shifted LJ: U(r) = 4 eps [(s/r)^12 - (s/r)^6] - U(cutoff)
    for r < cutoff, 0 beyond. The force is not shifted.
    """

    kind = PotentialKind.LENNARD_JONES

    def __init__(self, terms, box_length, periodic):
        super().__init__(terms, box_length, periodic)
        self.epsilon = self.parameter("epsilon")[:, None]
        self.sigma = self.parameter("sigma")[:, None]
        self.cutoff = self.parameter("cutoff")[:, None]

        sr6_cut = (self.sigma / self.cutoff) ** 6
        self.shift = 4.0 * self.epsilon * (sr6_cut**2 - sr6_cut)

    def radial(self, r):
        inside = r < self.cutoff
        sr6 = (self.sigma / r) ** 6
        raw = 4.0 * self.epsilon * (sr6**2 - sr6)
        if np.any(raw[inside] > LJ_OVERFLOW_THRESHOLD):
            raise SingularConfigurationError(
                f"Lennard-Jones overlap: energy exceeds {LJ_OVERFLOW_THRESHOLD:.0e}"
            )
        energy = np.where(inside, raw - self.shift, 0.0)
        d_energy = np.where(inside, 4.0 * self.epsilon * (6.0 * sr6 - 12.0 * sr6**2) / r, 0.0)
        return energy, d_energy
