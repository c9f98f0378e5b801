import numpy as np

from potentials.base_potential import PotentialKind
from potentials.pair_potential import CentralPairPotential


class HarmonicBond(CentralPairPotential):
    """U = k/2 (r - r0)^2"""

    kind = PotentialKind.HARMONIC_BOND

    def __init__(self, terms, box_length, periodic):
        super().__init__(terms, box_length, periodic)
        self.k = self.parameter("k")[:, None]
        self.r0 = self.parameter("r0")[:, None]

    def radial(self, r):
        stretch = r - self.r0
        return 0.5 * self.k * stretch**2, self.k * stretch


class MorseBond(CentralPairPotential):
    """U = D (1 - exp(-a (r - r0)))^2, zero at the well minimum"""

    kind = PotentialKind.MORSE

    def __init__(self, terms, box_length, periodic):
        super().__init__(terms, box_length, periodic)
        self.depth = self.parameter("D")[:, None]
        self.a = self.parameter("a")[:, None]
        self.r0 = self.parameter("r0")[:, None]

    def radial(self, r):
        decay = np.exp(-self.a * (r - self.r0))
        energy = self.depth * (1.0 - decay) ** 2
        d_energy = 2.0 * self.depth * self.a * decay * (1.0 - decay)
        return energy, d_energy
