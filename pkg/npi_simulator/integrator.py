import logging

import numpy as np

from constants import DT_ERROR_FACTOR, DT_WARN_FACTOR
from errors import DomainError, IntegrationError, StepSizeError
from force_field import ForceField, spring_energy
from metrics import integration_steps_counter
from normal_modes import build_normal_modes
from regions import RegionThermostat, assign_regions
from ring_polymer import RingPolymerState, omega_p
from system import SystemSpec
from thermostat import ThermostatKind, ThermostatSpec


class BAOABIntegrator:
    """
    BAOAB splitting for the ring-polymer Hamiltonian

        H_P = sum p^2 / 2m + sum_j m omega_P^2 / 2 |x^(j+1) - x^(j)|^2 + (1/P) sum_j U(x^(j))

    B: half kick with the physical forces divided by P.
    A: half step of the free ring, exact per normal mode.
    O: thermostat (PILE-L per mode, or region Langevin on Cartesian beads).

    Every bead carries the physical mass. The state is advanced in place and
    returned; callers never see a half-stepped state.
    """

    def __init__(
        self,
        spec: SystemSpec,
        field: ForceField,
        thermostat: ThermostatSpec,
        dt: float,
        n_beads: int,
        phase: str = "equilibrium",
    ):
        self.logger = logging.getLogger(self.__class__.__name__)

        assert isinstance(spec, SystemSpec)
        assert isinstance(field, ForceField)
        assert isinstance(thermostat, ThermostatSpec)

        if not dt > 0:
            raise DomainError(f"dt must be positive, got {dt}")

        self.spec = spec
        self.field = field
        self.thermostat = thermostat
        self.dt = float(dt)
        self.n_beads = n_beads
        self.phase = phase

        self.masses = spec.mass_array
        self.modes = build_normal_modes(n_beads)
        self.mode_omega = self.modes.frequencies * omega_p(spec.beta, spec.hbar, n_beads)
        self._check_step_size()

        self._free_ring = self._free_ring_propagator(0.5 * self.dt)
        self.region_thermostat = None
        match thermostat.kind:
            case ThermostatKind.NONE:
                pass
            case ThermostatKind.PILE_L:
                target = spec.temperature if thermostat.target_T is None else thermostat.target_T
                c1 = np.exp(-thermostat.mode_frictions(self.mode_omega) * self.dt)
                self._ou_c1 = c1[None, :, None]
                self._ou_c2 = (
                    np.sqrt(1.0 - c1**2)[None, :, None]
                    * np.sqrt(self.masses * target)[:, None, None]
                )
            case ThermostatKind.REGION_LANGEVIN:
                self.region_thermostat = RegionThermostat(
                    thermostat.layout, thermostat.targets, self.masses
                )

    def _check_step_size(self):
        omega_max = float(self.mode_omega.max())
        product = self.dt * omega_max
        if product > DT_ERROR_FACTOR:
            raise StepSizeError(
                f"dt * omega_max = {product:.3f} exceeds {DT_ERROR_FACTOR}; "
                f"use dt < {DT_WARN_FACTOR / omega_max:.4g} for P={self.n_beads}"
            )
        if product > DT_WARN_FACTOR:
            self.logger.warning(
                f"dt * omega_max = {product:.3f} exceeds the recommended {DT_WARN_FACTOR} for P={self.n_beads}"
            )

    def _free_ring_propagator(self, h: float):
        omega = self.mode_omega[None, :, None]
        mass = self.masses[:, None, None]
        moving = omega > 0
        safe_omega = np.where(moving, omega, 1.0)

        cosine = np.where(moving, np.cos(omega * h), 1.0)
        sine = np.sin(omega * h)
        q_from_p = np.where(moving, sine / (mass * safe_omega), h / mass)
        p_from_q = np.where(moving, -mass * safe_omega * sine, 0.0)
        return cosine, q_from_p, p_from_q

    def forces(self, state: RingPolymerState) -> np.ndarray:
        _, forces = self.field.evaluate(state.positions)
        if not np.all(np.isfinite(forces)):
            self.logger.error(f"Non-finite forces at step {state.step}: {state}")
            raise IntegrationError(
                f"non-finite forces at step {state.step}, time {state.time}", state=state.copy()
            )
        return forces

    def _kick(self, state: RingPolymerState):
        state.momenta += (0.5 * self.dt / self.n_beads) * state.forces

    def _drift(self, state: RingPolymerState):
        cosine, q_from_p, p_from_q = self._free_ring
        q = self.modes.to_normal(state.positions)
        p = self.modes.to_normal(state.momenta)
        q, p = cosine * q + q_from_p * p, p_from_q * q + cosine * p
        state.positions = self.modes.from_normal(q)
        state.momenta = self.modes.from_normal(p)

    def _thermalize(self, state: RingPolymerState):
        match self.thermostat.kind:
            case ThermostatKind.NONE:
                pass
            case ThermostatKind.PILE_L:
                p = self.modes.to_normal(state.momenta)
                p = self._ou_c1 * p + self._ou_c2 * state.rng.normal(p.shape)
                state.momenta = self.modes.from_normal(p)
            case ThermostatKind.REGION_LANGEVIN:
                labels = assign_regions(self.thermostat.layout, state)
                self.region_thermostat.apply(state, labels, self.dt, state.rng)

    def step(self, state: RingPolymerState) -> RingPolymerState:
        if state.forces is None:
            state.forces = self.forces(state)

        self._kick(state)
        self._drift(state)
        self._thermalize(state)
        self._drift(state)
        state.forces = self.forces(state)
        self._kick(state)

        if not np.all(np.isfinite(state.momenta)):
            raise IntegrationError(f"non-finite momenta at step {state.step}", state=state.copy())

        state.time += self.dt
        state.step += 1
        integration_steps_counter.labels(phase=self.phase).inc()
        return state

    def run(self, state: RingPolymerState, n_steps: int) -> RingPolymerState:
        for _ in range(n_steps):
            self.step(state)
        return state

    def hamiltonian(self, state: RingPolymerState) -> float:
        """H_P of the current state, conserved with thermostat none."""
        kinetic = float(np.sum(state.momenta**2 / (2.0 * self.masses[:, None, None])))
        energy, _ = self.field.evaluate(state.positions)
        return kinetic + spring_energy(self.spec, state) + float(energy.sum()) / state.n_beads


def step_baoab(
    state: RingPolymerState,
    field: ForceField,
    spec: SystemSpec,
    thermostat: ThermostatSpec,
    dt: float,
) -> RingPolymerState:
    """One BAOAB step. Loops should build a BAOABIntegrator once instead."""
    return BAOABIntegrator(spec, field, thermostat, dt, state.n_beads).step(state)
