import numpy as np

from potentials.base_potential import BasePotential, PotentialKind, minimum_image


class ExternalWell(BasePotential):
    """
    Harmonic tether U = k_ext/2 |x - center|^2 on each member particle.
    Used to pin chain ends in open test setups and as the oscillator benchmark well.
    """

    kind = PotentialKind.EXTERNAL_WELL

    def __init__(self, terms, box_length, periodic):
        super().__init__(terms, box_length, periodic)

        rows = [
            (member, term.params["k_ext"], term.params["center"])
            for term in self.terms
            for member in term.members
        ]
        self.particles = np.array([row[0] for row in rows], dtype=int)
        self.k_ext = np.array([row[1] for row in rows], dtype=float)
        self.centers = np.array([row[2] for row in rows], dtype=float).reshape(len(rows), -1)

    def offsets(self, positions):
        offset = positions[self.particles] - self.centers[:, None, :]
        return minimum_image(offset, self.box_length, self.periodic)

    def evaluate(self, positions):
        forces = np.zeros_like(positions)
        if len(self.particles) == 0:
            return np.zeros(positions.shape[1]), forces

        offset = self.offsets(positions)
        energy = 0.5 * self.k_ext[:, None] * np.sum(offset**2, axis=-1)
        np.add.at(forces, self.particles, -self.k_ext[:, None, None] * offset)
        return energy.sum(axis=0), forces

    def particle_energies(self, positions):
        """Returns (particle index, energy per slice) rows for per-atom bookkeeping."""
        offset = self.offsets(positions)
        return self.particles, 0.5 * self.k_ext[:, None] * np.sum(offset**2, axis=-1)
