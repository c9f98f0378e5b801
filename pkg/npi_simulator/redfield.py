import logging
import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from constants import BOHR_MERGE_TOLERANCE, POSITIVITY_TOLERANCE
from density_matrix import DensityMatrix, as_operator, check_dimensions, is_hermitian
from errors import ConfigurationError, DomainError
from lindblad import LindbladGenerator, commutator, matrix_of
from positivity import positivity_report
from presets import EXCITED, GROUND, operator
from propagator import evolve, superoperator_of


def merge_frequencies(frequencies, tolerance: float = BOHR_MERGE_TOLERANCE) -> list[float]:
    """Representative Bohr frequencies; values within tolerance (relative, absolute below 1) share one block."""
    merged = []
    for value in sorted(frequencies):
        if merged and abs(value - merged[-1][-1]) <= tolerance * max(1.0, abs(value)):
            merged[-1].append(value)
        else:
            merged.append([value])
    return [float(np.mean(block)) for block in merged]


class RateTable:
    """
    Bath rates R(omega) at system Bohr frequencies, omega > 0 meaning the
    system loses energy. The real part sets the dissipative rate, the imaginary
    part the Lamb shift. Frequencies absent from the table have zero rate.
    """

    def __init__(self, entries, tolerance: float = BOHR_MERGE_TOLERANCE):
        pairs = list(entries.items()) if isinstance(entries, dict) else [tuple(entry) for entry in entries]

        table = []
        for omega, rate in pairs:
            omega = float(omega)
            rate = complex(rate)
            if not (math.isfinite(omega) and math.isfinite(rate.real) and math.isfinite(rate.imag)):
                raise DomainError(f"rate table entry ({omega}, {rate}) is not finite")
            table.append((omega, rate))

        self.entries = table
        self.tolerance = tolerance

    def __call__(self, omega: float) -> complex:
        for frequency, rate in self.entries:
            if abs(frequency - omega) <= self.tolerance * max(1.0, abs(omega)):
                return rate
        return 0j

    def __repr__(self):
        return f"RateTable[{self.entries}]"


class RedfieldGenerator:
    """
    Born-Markov master equation in double-commutator form

        drho/dt = -(i/hbar)[H_S, rho] - sum_c ([A_c, Lambda_c rho] - [A_c, rho Lambda_c^+]),
        Lambda_c = alpha^2 sum_omega R_c(omega) A_c(omega),

    with A(omega) = sum_{E_b - E_a = omega} |a><a| A |b><b| in the eigenbasis of H_S.
    """

    def __init__(self, hamiltonian, couplings, alpha2: float = 1.0, hbar: float = 1.0):
        self.logger = logging.getLogger(self.__class__.__name__)

        hamiltonian = as_operator(hamiltonian, "system hamiltonian")
        if not is_hermitian(hamiltonian):
            raise DomainError("system hamiltonian is not Hermitian")
        if not (alpha2 >= 0 and hbar > 0):
            raise DomainError(f"need alpha2 >= 0 and hbar > 0, got {alpha2}, {hbar}")

        checked = []
        for index, (coupling, table) in enumerate(couplings):
            coupling = as_operator(coupling, f"coupling {index}")
            check_dimensions(hamiltonian, coupling)
            if not is_hermitian(coupling):
                raise DomainError(f"coupling {index} is not Hermitian")
            if not isinstance(table, RateTable):
                table = RateTable(table)
            checked.append((coupling, table))

        self.hamiltonian = hamiltonian
        self.couplings = checked
        self.alpha2 = float(alpha2)
        self.hbar = float(hbar)

        self.energies, self.basis = np.linalg.eigh(hamiltonian)
        self.frequencies = merge_frequencies(
            [self.energies[b] - self.energies[a] for a in range(self.dim) for b in range(self.dim)]
        )
        self.components = [self.bohr_components(coupling) for coupling, _ in self.couplings]
        self.lambdas = [
            self.alpha2 * sum((table(omega) * part for omega, part in components), np.zeros_like(hamiltonian))
            for (_, table), components in zip(self.couplings, self.components)
        ]

    @property
    def dim(self) -> int:
        return self.hamiltonian.shape[0]

    def _block(self, omega: float) -> int:
        return int(np.argmin([abs(omega - frequency) for frequency in self.frequencies]))

    def bohr_components(self, coupling: np.ndarray) -> list[tuple[float, np.ndarray]]:
        """(omega, A(omega)) for every merged Bohr frequency with a nonzero component."""
        in_basis = self.basis.conj().T @ coupling @ self.basis
        parts = [np.zeros_like(coupling) for _ in self.frequencies]
        for a in range(self.dim):
            for b in range(self.dim):
                if in_basis[a, b] == 0:
                    continue
                block = self._block(self.energies[b] - self.energies[a])
                parts[block] += in_basis[a, b] * np.outer(self.basis[:, a], self.basis[:, b].conj())
        return [
            (omega, part)
            for omega, part in zip(self.frequencies, parts)
            if np.max(np.abs(part)) > 0.0
        ]

    def rhs(self, rho) -> np.ndarray:
        rho = matrix_of(rho)
        check_dimensions(self.hamiltonian, rho)

        derivative = (-1j / self.hbar) * commutator(self.hamiltonian, rho)
        for (coupling, _), strength in zip(self.couplings, self.lambdas):
            derivative -= commutator(coupling, strength @ rho) - commutator(coupling, rho @ strength.conj().T)
        return derivative

    def superoperator(self) -> np.ndarray:
        return superoperator_of(self.rhs, self.dim)

    def __repr__(self):
        return (
            f"RedfieldGenerator[dim={self.dim}, couplings={len(self.couplings)}, alpha2={self.alpha2}, "
            f"frequencies={np.round(self.frequencies, 9).tolist()}]"
        )


def redfield_rhs(gen: RedfieldGenerator, rho) -> np.ndarray:
    return gen.rhs(rho)


def secular_reduce(gen: RedfieldGenerator) -> LindbladGenerator:
    """
    Drops every term coupling distinct Bohr frequencies: jumps A_c(omega) with
    rate 2 alpha^2 Re R_c(omega), plus the Lamb shift
    hbar alpha^2 sum Im R_c(omega) A_c(omega)^+ A_c(omega) added to H_S.
    """
    hamiltonian = gen.hamiltonian.copy()
    jumps = []
    for (_, table), components in zip(gen.couplings, gen.components):
        for omega, part in components:
            rate = table(omega)
            dissipative = 2.0 * gen.alpha2 * rate.real
            if dissipative < 0.0:
                raise ConfigurationError(
                    f"secular rate {dissipative:.6g} at omega = {omega:.6g} is negative; the rate table is inconsistent"
                )
            if dissipative > 0.0:
                jumps.append((part, dissipative))
            if rate.imag != 0.0:
                hamiltonian = hamiltonian + gen.hbar * gen.alpha2 * rate.imag * (part.conj().T @ part)
    hamiltonian = 0.5 * (hamiltonian + hamiltonian.conj().T)
    return LindbladGenerator(hamiltonian, jumps, gen.hbar)


def nonsecular_qubit_case(omega0: float = 1.0, gamma: float = 1.0, alpha2: float = 1.0):
    """
    H = (omega0 / 2) sigma_z coupled through sigma_x to a bath that only absorbs
    at +omega0. From psi = 0.5 |e> + sqrt(0.75) |g> the smallest eigenvalue of
    rho starts at 0 and decreases at rate 0.25 alpha2 gamma, so positivity is
    lost immediately.
    """
    gen = RedfieldGenerator(
        0.5 * omega0 * operator("sigma_z"),
        [(operator("sigma_x"), RateTable({omega0: gamma}))],
        alpha2=alpha2,
    )
    rho0 = DensityMatrix.pure(0.5 * EXCITED + math.sqrt(0.75) * GROUND)
    return gen, rho0


def coupled_qubit(angle: float, omega0: float = 1.0, gamma: float = 1.0, alpha2: float = 1.0) -> RedfieldGenerator:
    """Coupling cos(angle) sigma_x + sin(angle) sigma_z with the same one-sided rate table."""
    coupling = math.cos(angle) * operator("sigma_x") + math.sin(angle) * operator("sigma_z")
    return RedfieldGenerator(
        0.5 * omega0 * operator("sigma_z"),
        [(coupling, RateTable({omega0: gamma}))],
        alpha2=alpha2,
    )


def bloch_state(theta: float, phi: float) -> DensityMatrix:
    return DensityMatrix.pure(math.cos(0.5 * theta) * EXCITED + np.exp(1j * phi) * math.sin(0.5 * theta) * GROUND)


class ViolationScan:
    """
    Evolves the Redfield qubit over a grid of coupling angles and initial pure
    states as independent tasks; results come back in input order.
    """

    def __init__(self, t_final: float, dt: float, tolerance: float = POSITIVITY_TOLERANCE, max_workers: int = 1):
        self.logger = logging.getLogger(self.__class__.__name__)

        self.t_final = t_final
        self.dt = dt
        self.tolerance = tolerance
        self.max_workers = max_workers

    def _thread_evaluate(self, angle, theta, phi, omega0, gamma, alpha2):
        gen = coupled_qubit(angle, omega0, gamma, alpha2)
        report = positivity_report(
            evolve(gen, bloch_state(theta, phi), self.t_final, self.dt), self.tolerance, "redfield"
        )
        return {
            "angle": angle,
            "theta": theta,
            "phi": phi,
            "min_eigenvalue": float(np.min(report.min_eigenvalues)),
            "first_violation": report.first_violation,
        }

    def run(self, angles, thetas, phis=(0.0,), omega0=1.0, gamma=1.0, alpha2=1.0) -> list[dict]:
        grid = [(angle, theta, phi) for angle in angles for theta in thetas for phi in phis]
        self.logger.info(f"Scanning {len(grid)} Redfield configurations for positivity violations")
        with ThreadPoolExecutor(max_workers=self.max_workers) as executor:
            futures = [
                executor.submit(self._thread_evaluate, angle, theta, phi, omega0, gamma, alpha2)
                for angle, theta, phi in grid
            ]
            return [future.result() for future in futures]
