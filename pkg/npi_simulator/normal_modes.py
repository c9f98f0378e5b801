import math

import numpy as np


class NormalModeBasis:
    """
    Real orthogonal transform that diagonalizes the cyclic ring spring matrix.

    Attributes:
        n_beads: P
        transform: (P, P) matrix C with bead coordinates x_j = sum_k C[j, k] q_k
        frequencies: mode frequencies in units of omega_P, 2 sin(k pi / P), in k order
    """

    def __init__(self, n_beads: int, transform: np.ndarray, frequencies: np.ndarray):
        assert isinstance(n_beads, int)

        self.n_beads = n_beads
        self.transform = transform
        self.frequencies = frequencies

    def to_normal(self, beads: np.ndarray) -> np.ndarray:
        """(N, P, d) bead coordinates to (N, P, d) mode coordinates."""
        return np.einsum("jk,njd->nkd", self.transform, beads)

    def from_normal(self, modes: np.ndarray) -> np.ndarray:
        return np.einsum("jk,nkd->njd", self.transform, modes)

    def __repr__(self):
        return f"NormalModeBasis[P={self.n_beads}, frequencies={np.round(self.frequencies, 6).tolist()}]"


def build_normal_modes(n_beads: int) -> NormalModeBasis:
    if n_beads < 1:
        raise ValueError(f"n_beads must be >= 1, got {n_beads}")

    beads = np.arange(n_beads)
    transform = np.zeros((n_beads, n_beads))
    transform[:, 0] = 1.0 / math.sqrt(n_beads)
    for k in range(1, n_beads):
        phase = 2.0 * math.pi * beads * k / n_beads
        if 2 * k < n_beads:
            transform[:, k] = math.sqrt(2.0 / n_beads) * np.cos(phase)
        elif 2 * k == n_beads:
            transform[:, k] = (-1.0) ** beads / math.sqrt(n_beads)
        else:
            transform[:, k] = math.sqrt(2.0 / n_beads) * np.sin(phase)

    frequencies = 2.0 * np.sin(np.arange(n_beads) * math.pi / n_beads)
    return NormalModeBasis(n_beads, transform, frequencies)
