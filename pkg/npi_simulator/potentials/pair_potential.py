import numpy as np

from errors import SingularConfigurationError
from potentials.base_potential import BasePotential


class CentralPairPotential(BasePotential):
    """Two-body potential depending only on the minimum-image distance."""

    def radial(self, r: np.ndarray):
        """Returns (U(r), dU/dr) with r of shape (terms, B)."""
        raise NotImplementedError()

    def _geometry(self, positions: np.ndarray):
        i = self.members[:, 0]
        j = self.members[:, 1]
        rij = self.displacement(positions, i, j)
        r = np.linalg.norm(rij, axis=-1)
        if np.any(r == 0.0):
            raise SingularConfigurationError(
                f"{self.kind.value}: coincident particles in a pair term"
            )
        return i, j, rij, r

    def evaluate(self, positions: np.ndarray):
        forces = np.zeros_like(positions)
        if len(self.terms) == 0:
            return np.zeros(positions.shape[1]), forces

        i, j, rij, r = self._geometry(positions)
        energy, d_energy = self.radial(r)
        # force on i points along r_ij when dU/dr > 0
        f_i = (d_energy / r)[..., None] * rij
        np.add.at(forces, i, f_i)
        np.add.at(forces, j, -f_i)
        return energy.sum(axis=0), forces

    def pair_forces(self, positions: np.ndarray):
        i, j, rij, r = self._geometry(positions)
        energy, d_energy = self.radial(r)
        f_i = (d_energy / r)[..., None] * rij
        return i, j, rij, f_i, energy
