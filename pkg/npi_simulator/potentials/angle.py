import numpy as np

from potentials.base_potential import BasePotential, PotentialKind


class HarmonicAngle(BasePotential):
    """U = k_theta/2 (theta - theta0)^2 for members (i, j, k), j being the vertex."""

    kind = PotentialKind.HARMONIC_ANGLE

    def __init__(self, terms, box_length, periodic):
        super().__init__(terms, box_length, periodic)
        self.k_theta = self.parameter("k_theta")[:, None]
        self.theta0 = self.parameter("theta0")[:, None]

    def evaluate(self, positions):
        forces = np.zeros_like(positions)
        if len(self.terms) == 0:
            return np.zeros(positions.shape[1]), forces

        i, j, k = self.members[:, 0], self.members[:, 1], self.members[:, 2]
        a = self.displacement(positions, j, i)
        b = self.displacement(positions, j, k)
        norm_a = np.linalg.norm(a, axis=-1)
        norm_b = np.linalg.norm(b, axis=-1)

        cosine = np.clip(np.sum(a * b, axis=-1) / (norm_a * norm_b), -1.0, 1.0)
        theta = np.arccos(cosine)
        sine = np.maximum(np.sqrt(1.0 - cosine**2), 1e-12)

        delta = theta - self.theta0
        energy = 0.5 * self.k_theta * delta**2

        prefactor = (self.k_theta * delta / sine)[..., None]
        dc_da = b / (norm_a * norm_b)[..., None] - cosine[..., None] * a / (norm_a**2)[..., None]
        dc_db = a / (norm_a * norm_b)[..., None] - cosine[..., None] * b / (norm_b**2)[..., None]
        f_i = prefactor * dc_da
        f_k = prefactor * dc_db

        np.add.at(forces, i, f_i)
        np.add.at(forces, k, f_k)
        np.add.at(forces, j, -(f_i + f_k))
        return energy.sum(axis=0), forces
