import logging
import math

import numpy as np

from errors import DomainError
from force_field import ForceField
from integrator import BAOABIntegrator
from observables import evaluate_observables, validate_observables
from ring_polymer import RingPolymerState
from system import SystemSpec
from thermostat import ThermostatSpec


class EstimatorSample:
    """Bead-averaged observable values at one time."""

    def __init__(self, time: float, values: dict):
        for name, value in values.items():
            if not math.isfinite(value):
                raise DomainError(f"observable {name} is not finite at time {time}: {value}")

        self.time = float(time)
        self.values = dict(values)

    def __eq__(self, other):
        if isinstance(other, EstimatorSample):
            return self.time == other.time and self.values == other.values
        return False

    def __repr__(self):
        return f"EstimatorSample[time={self.time}, values={self.values}]"


class EquilibriumRun:
    """
    Trajectory source produced by EquilibriumSampler.

    Attributes:
        samples: EstimatorSample every sample_stride steps
        snapshots: step -> full RingPolymerState copy, every snapshot_stride steps
        n_steps: production steps taken after warm-up
        final_state: state after the last step
    """

    def __init__(self, samples, snapshots, n_steps, sample_stride, dt, final_state):
        self.samples = samples
        self.snapshots = snapshots
        self.n_steps = n_steps
        self.sample_stride = sample_stride
        self.dt = dt
        self.final_state = final_state

    def series(self, name: str) -> np.ndarray:
        return np.array([sample.values[name] for sample in self.samples])

    def times(self) -> np.ndarray:
        return np.array([sample.time for sample in self.samples])

    def mean(self, name: str) -> float:
        return float(self.series(name).mean())

    def __repr__(self):
        return (
            f"EquilibriumRun[n_steps={self.n_steps}, samples={len(self.samples)}, "
            f"snapshots={len(self.snapshots)}]"
        )


class EquilibriumSampler:
    """Thermostatted ring-polymer run recording A_P every sample_stride steps."""

    def __init__(
        self,
        spec: SystemSpec,
        field: ForceField,
        thermostat: ThermostatSpec,
        dt: float,
        observables: list[str],
        sample_stride: int = 1,
        snapshot_stride: int = None,
        n_warmup: int = 0,
        n_beads: int = 1,
    ):
        self.logger = logging.getLogger(self.__class__.__name__)

        assert isinstance(sample_stride, int) and sample_stride > 0
        assert snapshot_stride is None or (isinstance(snapshot_stride, int) and snapshot_stride > 0)

        names = list(observables)
        if "potential_energy" not in names:
            names.append("potential_energy")
        validate_observables(names, spec)

        self.spec = spec
        self.field = field
        self.observables = names
        self.sample_stride = sample_stride
        self.snapshot_stride = snapshot_stride
        self.n_warmup = n_warmup
        self.integrator = BAOABIntegrator(spec, field, thermostat, dt, n_beads, phase="equilibrium")

    def run(self, state: RingPolymerState, n_steps: int) -> EquilibriumRun:
        assert state.n_beads == self.integrator.n_beads

        if self.n_warmup > 0:
            self.logger.debug(f"Warming up for {self.n_warmup} steps...")
            self.integrator.run(state, self.n_warmup)

        samples = []
        snapshots = {}
        for step in range(1, n_steps + 1):
            self.integrator.step(state)
            if step % self.sample_stride == 0:
                values = evaluate_observables(self.observables, state, self.field, self.spec)
                samples.append(EstimatorSample(state.time, values))
            if self.snapshot_stride is not None and step % self.snapshot_stride == 0:
                snapshots[step] = state.copy()

        self.logger.info(
            f"Equilibrium run finished: {n_steps} steps, {len(samples)} samples, {len(snapshots)} snapshots"
        )
        return EquilibriumRun(samples, snapshots, n_steps, self.sample_stride, self.integrator.dt, state)


def run_equilibrium_sampling(
    spec: SystemSpec,
    field: ForceField,
    thermostat: ThermostatSpec,
    dt: float,
    n_steps: int,
    sample_stride: int,
    observables: list[str],
    state: RingPolymerState,
    n_warmup: int = 0,
) -> list[EstimatorSample]:
    sampler = EquilibriumSampler(
        spec,
        field,
        thermostat,
        dt,
        observables,
        sample_stride=sample_stride,
        n_warmup=n_warmup,
        n_beads=state.n_beads,
    )
    return sampler.run(state, n_steps).samples
