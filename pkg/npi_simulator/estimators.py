import math

import numpy as np

from force_field import ForceField, spring_energy
from ring_polymer import RingPolymerState
from system import SystemSpec


def estimator_position_observable(state: RingPolymerState, observable) -> float:
    """A_P = (1/P) sum_j A(x_1^(j), ..., x_N^(j)); observable maps an (N, d) slice to a real."""
    values = [observable(state.positions[:, j, :]) for j in range(state.n_beads)]
    return float(np.mean(values))


def energy_estimator_primitive(state: RingPolymerState, field: ForceField, spec: SystemSpec) -> float:
    """N P d / (2 beta) - spring energy + (1/P) sum_j U_j"""
    n_beads = state.n_beads
    energy, _ = field.evaluate(state.positions)
    free = spec.n_particles * n_beads * spec.dimension / (2.0 * spec.beta)
    return free - spring_energy(spec, state) + float(energy.sum()) / n_beads


def energy_estimator_virial(state: RingPolymerState, field: ForceField, spec: SystemSpec) -> float:
    """Centroid virial: N d / (2 beta) + (1/P) sum_j [U_j - 1/2 (x_j - centroid) . F_j]"""
    n_beads = state.n_beads
    energy, forces = field.evaluate(state.positions)
    offset = state.positions - state.centroid()[:, None, :]
    virial = -0.5 * float(np.sum(offset * forces))
    free = spec.n_particles * spec.dimension / (2.0 * spec.beta)
    return free + (float(energy.sum()) + virial) / n_beads


def kinetic_energy(state: RingPolymerState, masses: np.ndarray) -> float:
    """Bead-averaged kinetic energy (1/P) sum_j sum_i |p_i^(j)|^2 / 2 m_i."""
    return float(np.sum(state.momenta**2 / (2.0 * masses[:, None, None]))) / state.n_beads


def bead_kinetic_temperature(state: RingPolymerState, masses: np.ndarray) -> float:
    dof = state.n_particles * state.n_beads * state.dimension
    return float(np.sum(state.momenta**2 / masses[:, None, None])) / dof


def centroid_kinetic_temperature(state: RingPolymerState, masses: np.ndarray) -> float:
    """The centroid moves with momentum sum_j p^(j) and mass P m."""
    total = state.momenta.sum(axis=1)
    dof = state.n_particles * state.dimension
    return float(np.sum(total**2 / (state.n_beads * masses[:, None]))) / dof


def harmonic_energy_finite_p(beta: float, hbar: float, omega: float, n_beads: int) -> float:
    """
    Exact mean of the primitive estimator for a 1D harmonic oscillator at finite P.

    E_P = P / (2 beta) + sum_k (b beta^2 - a_k) / (2 beta (a_k + b beta^2)),
    a_k = 4 P sin^2(k pi / P) / hbar^2, b = omega^2 / P. Independent of the mass.
    """
    k = np.arange(n_beads)
    a = 4.0 * n_beads * np.sin(k * math.pi / n_beads) ** 2 / hbar**2
    b = omega**2 / n_beads
    return n_beads / (2.0 * beta) + float(
        np.sum((b * beta**2 - a) / (2.0 * beta * (a + b * beta**2)))
    )


def harmonic_energy_quantum(beta: float, hbar: float, omega: float) -> float:
    """(hbar omega / 2) coth(beta hbar omega / 2)"""
    half = 0.5 * beta * hbar * omega
    return 0.5 * hbar * omega / math.tanh(half)
