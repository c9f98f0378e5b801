import numpy as np
import scipy.linalg

from constants import HERMITIAN_TOLERANCE, MAX_HILBERT_DIM, TRACE_TOLERANCE
from errors import DomainError


def as_operator(matrix, name: str = "operator") -> np.ndarray:
    matrix = np.asarray(matrix, dtype=complex)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise DomainError(f"{name} must be a square matrix, got shape {matrix.shape}")
    if matrix.shape[0] > MAX_HILBERT_DIM:
        raise DomainError(f"{name} dimension {matrix.shape[0]} exceeds the dense limit {MAX_HILBERT_DIM}")
    if not np.all(np.isfinite(matrix)):
        raise DomainError(f"{name} has non-finite entries")
    return matrix


def is_hermitian(matrix: np.ndarray, tolerance: float = HERMITIAN_TOLERANCE) -> bool:
    return bool(np.max(np.abs(matrix - matrix.conj().T), initial=0.0) <= tolerance)


def check_dimensions(*operators):
    shapes = {operator.shape for operator in operators}
    if len(shapes) != 1:
        raise DomainError(f"dimension mismatch between operators: {sorted(shapes)}")


class DensityMatrix:
    """
    dim x dim complex matrix with trace, Hermiticity and positivity diagnostics.

    Construction checks Hermiticity and unit trace unless validate=False, which
    integrators use for intermediate states whose drift they track themselves.
    """

    def __init__(self, entries, validate: bool = True):
        entries = as_operator(entries, "density matrix")
        if validate:
            if not is_hermitian(entries):
                raise DomainError("density matrix is not Hermitian")
            if abs(np.trace(entries) - 1.0) > TRACE_TOLERANCE:
                raise DomainError(f"density matrix trace is {np.trace(entries)}, expected 1")

        self.entries = entries

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @classmethod
    def pure(cls, state) -> "DensityMatrix":
        state = np.asarray(state, dtype=complex)
        state = state / np.linalg.norm(state)
        return cls(np.outer(state, state.conj()))

    @classmethod
    def maximally_mixed(cls, dim: int) -> "DensityMatrix":
        return cls(np.eye(dim, dtype=complex) / dim)

    @classmethod
    def gibbs(cls, hamiltonian, beta: float) -> "DensityMatrix":
        hamiltonian = as_operator(hamiltonian, "hamiltonian")
        weights = scipy.linalg.expm(-beta * hamiltonian)
        weights = 0.5 * (weights + weights.conj().T)
        return cls(weights / np.trace(weights).real)

    def hermitian_part(self) -> np.ndarray:
        return 0.5 * (self.entries + self.entries.conj().T)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.hermitian_part())

    def min_eigenvalue(self) -> float:
        return float(self.eigenvalues()[0])

    def trace_deviation(self) -> float:
        return float(abs(np.trace(self.entries) - 1.0))

    def purity(self) -> float:
        return float(np.real(np.trace(self.entries @ self.entries)))

    def is_physical(self, tolerance: float) -> bool:
        return self.min_eigenvalue() >= -tolerance

    def to_pairs(self) -> list:
        return [[[value.real, value.imag] for value in row] for row in self.entries]

    def __eq__(self, other):
        if isinstance(other, DensityMatrix):
            return np.array_equal(self.entries, other.entries)
        return False

    def __repr__(self):
        return f"DensityMatrix[dim={self.dim}, trace={np.trace(self.entries).real:.12g}]"
