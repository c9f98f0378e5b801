import numpy as np

from density_matrix import as_operator
from errors import ConfigurationError

# qubit basis ordering {e, g}: sigma_z |e> = +|e>
OPERATORS = {
    "identity": np.eye(2, dtype=complex),
    "sigma_x": np.array([[0, 1], [1, 0]], dtype=complex),
    "sigma_y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "sigma_z": np.array([[1, 0], [0, -1]], dtype=complex),
    "sigma_plus": np.array([[0, 1], [0, 0]], dtype=complex),
    "sigma_minus": np.array([[0, 0], [1, 0]], dtype=complex),
    "projector_e": np.array([[1, 0], [0, 0]], dtype=complex),
    "projector_g": np.array([[0, 0], [0, 1]], dtype=complex),
}

EXCITED = np.array([1, 0], dtype=complex)
GROUND = np.array([0, 1], dtype=complex)


def operator(name: str) -> np.ndarray:
    if name not in OPERATORS:
        raise ConfigurationError(f"unknown operator preset '{name}', known: {sorted(OPERATORS)}")
    return OPERATORS[name].copy()


def matrix_from_pairs(rows) -> np.ndarray:
    """[[[re, im], ...], ...] -> complex matrix."""
    pairs = np.asarray(rows, dtype=float)
    if pairs.ndim != 3 or pairs.shape[-1] != 2:
        raise ConfigurationError(f"matrix must be rows of [re, im] pairs, got shape {pairs.shape}")
    return as_operator(pairs[..., 0] + 1j * pairs[..., 1])


def resolve_operator(value) -> np.ndarray:
    """A preset name, a scaled preset {"preset": name, "scale": s}, or a [re, im] pair matrix."""
    if isinstance(value, str):
        return operator(value)
    if isinstance(value, dict):
        return float(value.get("scale", 1.0)) * operator(value["preset"])
    return matrix_from_pairs(value)
