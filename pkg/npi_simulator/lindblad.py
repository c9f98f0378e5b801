import logging
import math

import numpy as np

from density_matrix import DensityMatrix, as_operator, check_dimensions, is_hermitian
from errors import DomainError
from presets import operator


def matrix_of(rho) -> np.ndarray:
    return rho.entries if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def left_right_superoperator(left: np.ndarray, right: np.ndarray) -> np.ndarray:
    """Matrix of X -> left X right acting on row-major vec(X)."""
    return np.kron(left, right.T)


class LindbladGenerator:
    """
    GKSL generator drho/dt = -(i/hbar)[H, rho] + sum_j lambda_j (L_j rho L_j^+ - 1/2 {L_j^+ L_j, rho}).

    Attributes:
        hamiltonian: Hermitian H
        jumps: list of (L_j, lambda_j) with lambda_j >= 0
        hbar: reduced Planck constant
    """

    def __init__(self, hamiltonian, jumps=(), hbar: float = 1.0):
        self.logger = logging.getLogger(self.__class__.__name__)

        hamiltonian = as_operator(hamiltonian, "hamiltonian")
        if not is_hermitian(hamiltonian):
            raise DomainError("hamiltonian is not Hermitian")
        if not hbar > 0:
            raise DomainError(f"hbar must be positive, got {hbar}")

        checked = []
        for index, (jump, rate) in enumerate(jumps):
            jump = as_operator(jump, f"jump {index}")
            check_dimensions(hamiltonian, jump)
            if not (rate >= 0 and math.isfinite(rate)):
                raise DomainError(f"jump {index} rate must be finite and >= 0, got {rate}")
            checked.append((jump, float(rate)))

        self.hamiltonian = hamiltonian
        self.jumps = checked
        self.hbar = float(hbar)

    @property
    def dim(self) -> int:
        return self.hamiltonian.shape[0]

    @property
    def is_closed(self) -> bool:
        return all(rate == 0.0 for _, rate in self.jumps)

    @classmethod
    def thermal_qubit(cls, omega: float, beta: float, gamma: float, hbar: float = 1.0) -> "LindbladGenerator":
        """H = (hbar omega / 2) sigma_z with emission gamma (n + 1) and absorption gamma n, detailed balance at beta."""
        occupation = 1.0 / math.expm1(beta * hbar * omega)
        return cls(
            0.5 * hbar * omega * operator("sigma_z"),
            [
                (operator("sigma_minus"), gamma * (occupation + 1.0)),
                (operator("sigma_plus"), gamma * occupation),
            ],
            hbar,
        )

    def rhs(self, rho) -> np.ndarray:
        rho = matrix_of(rho)
        check_dimensions(self.hamiltonian, rho)

        derivative = (-1j / self.hbar) * commutator(self.hamiltonian, rho)
        for jump, rate in self.jumps:
            if rate == 0.0:
                continue
            decay = jump.conj().T @ jump
            derivative += rate * (jump @ rho @ jump.conj().T - 0.5 * (decay @ rho + rho @ decay))
        return derivative

    def superoperator(self) -> np.ndarray:
        identity = np.eye(self.dim)
        generator = (-1j / self.hbar) * (
            left_right_superoperator(self.hamiltonian, identity)
            - left_right_superoperator(identity, self.hamiltonian)
        )
        for jump, rate in self.jumps:
            decay = jump.conj().T @ jump
            generator += rate * (
                left_right_superoperator(jump, jump.conj().T)
                - 0.5 * left_right_superoperator(decay, identity)
                - 0.5 * left_right_superoperator(identity, decay)
            )
        return generator

    def __repr__(self):
        return f"LindbladGenerator[dim={self.dim}, jumps={[rate for _, rate in self.jumps]}, hbar={self.hbar}]"


def lindblad_rhs(gen: LindbladGenerator, rho) -> np.ndarray:
    return gen.rhs(rho)
