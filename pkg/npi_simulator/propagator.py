import logging
import math

import numpy as np

from constants import RK4_STABILITY_LIMIT, TRACE_DRIFT_LIMIT
from density_matrix import DensityMatrix, as_operator, check_dimensions
from errors import ContractError, DomainError, StepSizeError
from lindblad import LindbladGenerator, commutator, matrix_of

logger = logging.getLogger(__name__)

EIGEN_BOUND_LIMIT = 1024


class Trajectory:
    """Recorded density matrices of one evolution, with the trace drift at each time."""

    def __init__(self, times: list[float], states: list[DensityMatrix], trace_drift: list[float]):
        self.times = np.asarray(times, dtype=float)
        self.states = states
        self.trace_drift = np.asarray(trace_drift, dtype=float)

    def __len__(self):
        return len(self.states)

    def __iter__(self):
        return iter(zip(self.times, self.states))

    def element(self, row: int, column: int) -> np.ndarray:
        return np.array([state.entries[row, column] for state in self.states])

    def expectation(self, observable) -> np.ndarray:
        return np.array([expectation(state, observable) for state in self.states])

    def final(self) -> DensityMatrix:
        return self.states[-1]

    def __repr__(self):
        return f"Trajectory[points={len(self.states)}, t_final={self.times[-1] if len(self.times) else None}]"


def rk4_step(rhs, y: np.ndarray, dt: float) -> np.ndarray:
    k1 = rhs(y)
    k2 = rhs(y + 0.5 * dt * k1)
    k3 = rhs(y + 0.5 * dt * k2)
    k4 = rhs(y + dt * k3)
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def superoperator_of(rhs, dim: int) -> np.ndarray:
    """Dense matrix of a linear map on dim x dim matrices, row-major vec convention."""
    columns = []
    for index in range(dim * dim):
        basis = np.zeros(dim * dim, dtype=complex)
        basis[index] = 1.0
        columns.append(rhs(basis.reshape(dim, dim)).reshape(-1))
    return np.array(columns).T


def spectral_bound(gen) -> float:
    """Largest |eigenvalue| of the generator (a 1-norm upper bound for large spaces)."""
    generator = gen.superoperator()
    if generator.shape[0] <= EIGEN_BOUND_LIMIT:
        return float(np.max(np.abs(np.linalg.eigvals(generator))))
    return float(np.linalg.norm(generator, 1))


def check_step(gen, dt: float) -> float:
    bound = spectral_bound(gen)
    if dt * bound > RK4_STABILITY_LIMIT:
        raise StepSizeError(
            f"dt = {dt} times the generator's largest rate {bound:.4g} exceeds {RK4_STABILITY_LIMIT}; "
            f"use dt <= {RK4_STABILITY_LIMIT / (4.0 * bound):.3g} for accurate RK4"
        )
    return bound


def evolve(gen, rho0, t_final: float, dt: float, record_every: int = 1) -> Trajectory:
    """
    Fixed-step RK4 of drho/dt = gen.rhs(rho). After every step rho is replaced
    by its Hermitian part and the trace drift is recorded; a drift beyond the
    limit aborts with a step-size error.
    """
    if not (dt > 0 and t_final >= 0):
        raise DomainError(f"need dt > 0 and t_final >= 0, got dt={dt}, t_final={t_final}")
    assert isinstance(record_every, int) and record_every >= 1

    rho = matrix_of(rho0).copy()
    check_dimensions(gen.hamiltonian, rho)
    check_step(gen, dt)

    n_steps = int(round(t_final / dt))
    if not math.isclose(n_steps * dt, t_final, rel_tol=1e-9, abs_tol=1e-12):
        logger.warning(f"t_final {t_final} is not a multiple of dt {dt}; stopping at {n_steps * dt}")

    times, states, drift = [0.0], [DensityMatrix(rho, validate=False)], [abs(np.trace(rho) - 1.0)]
    for step in range(1, n_steps + 1):
        rho = rk4_step(gen.rhs, rho, dt)
        rho = 0.5 * (rho + rho.conj().T)
        deviation = abs(np.trace(rho) - 1.0)
        if deviation > TRACE_DRIFT_LIMIT:
            raise StepSizeError(
                f"trace drift {deviation:.3g} at t = {step * dt:.6g} exceeds {TRACE_DRIFT_LIMIT}; "
                f"halve dt (currently {dt})"
            )
        if step % record_every == 0 or step == n_steps:
            times.append(step * dt)
            states.append(DensityMatrix(rho, validate=False))
            drift.append(deviation)
    return Trajectory(times, states, drift)


def expectation(rho, observable) -> float:
    """Re tr(rho A); the imaginary part vanishes for Hermitian A."""
    rho = matrix_of(rho)
    observable = as_operator(observable, "observable")
    check_dimensions(rho, observable)
    return float(np.real(np.trace(rho @ observable)))


def heisenberg_check(gen: LindbladGenerator, observable, rho0, t: float, dt: float = 1e-3):
    """
    Returns (tr(rho(t) A), tr(rho(0) A(t))): Schroedinger evolution of the state
    against Heisenberg evolution dA/dt = (i/hbar)[H, A] of the observable.
    """
    if not gen.is_closed:
        raise ContractError("Schroedinger/Heisenberg equivalence is checked for closed systems only")

    observable = as_operator(observable, "observable")
    rho = matrix_of(rho0)
    check_dimensions(gen.hamiltonian, observable, rho)
    check_step(gen, dt)

    n_steps = max(1, int(round(t / dt)))
    step = t / n_steps

    def heisenberg(a):
        return (1j / gen.hbar) * commutator(gen.hamiltonian, a)

    evolved_rho = rho.copy()
    evolved_observable = observable.copy()
    for _ in range(n_steps):
        evolved_rho = rk4_step(gen.rhs, evolved_rho, step)
        evolved_observable = rk4_step(heisenberg, evolved_observable, step)
    return expectation(evolved_rho, observable), expectation(rho, evolved_observable)


def convergence_order(gen, rho0, t_final: float, dt: float) -> float:
    """Observed order from the final states at dt, dt/2 and dt/4."""
    finals = [evolve(gen, rho0, t_final, dt / factor).final().entries for factor in (1, 2, 4)]
    coarse = np.max(np.abs(finals[0] - finals[1]))
    fine = np.max(np.abs(finals[1] - finals[2]))
    if fine == 0.0:
        return math.inf
    return float(math.log2(coarse / fine))
