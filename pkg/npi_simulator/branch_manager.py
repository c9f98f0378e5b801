import logging
import time
from concurrent.futures import ThreadPoolExecutor

from branch_plan import BranchMode, BranchPlan, PerturbationSpec
from correlation import statistical_inefficiency
from ensemble import BranchEnsemble
from errors import BranchError, InsufficientSamplingError, RunTerminatedError
from force_field import ForceField
from integrator import BAOABIntegrator
from metrics import branch_duration, branches_completed_counter
from observables import evaluate_observables, validate_observables
from random_stream import RandomStream
from ring_polymer import RingPolymerState, thermal_momenta
from sampling import EquilibriumRun, EstimatorSample
from system import SystemSpec

logger = logging.getLogger(__name__)


def harvest_initial_conditions(equilibrium_run: EquilibriumRun, plan: BranchPlan) -> list[RingPolymerState]:
    """Full phase-space snapshots at steps spacing, 2 spacing, ..., n_branches spacing."""
    needed = plan.n_branches * plan.spacing_steps
    if equilibrium_run.n_steps < needed:
        raise InsufficientSamplingError(
            f"{plan.n_branches} branches at spacing {plan.spacing_steps} need {needed} steps, "
            f"run has {equilibrium_run.n_steps}"
        )

    steps = [plan.spacing_steps * (index + 1) for index in range(plan.n_branches)]
    missing = [step for step in steps if step not in equilibrium_run.snapshots]
    if missing:
        raise InsufficientSamplingError(f"run kept no snapshot at steps {missing[:5]}")

    if equilibrium_run.samples:
        inefficiency = statistical_inefficiency(equilibrium_run.series("potential_energy"))
        decorrelation_steps = inefficiency * equilibrium_run.sample_stride
        if plan.spacing_steps < decorrelation_steps:
            logger.warning(
                f"Harvest spacing {plan.spacing_steps} steps is below the potential-energy "
                f"decorrelation time of {decorrelation_steps:.1f} steps; branches are correlated"
            )

    return [equilibrium_run.snapshots[step].copy() for step in steps]


def launch_state(initial: RingPolymerState, plan: BranchPlan, spec: SystemSpec, branch_id: int):
    state = initial.copy()
    match plan.mode:
        case BranchMode.FRESH:
            state.rng = RandomStream(plan.seed, plan.stream_ids[branch_id])
        case BranchMode.CONTINUATION:
            pass
        case BranchMode.RESAMPLE:
            state.rng = RandomStream(plan.seed, plan.stream_ids[branch_id])
            state.momenta = thermal_momenta(spec, state.n_beads, state.rng)
    state.forces = None
    state.time = 0.0
    state.step = 0
    return state


def run_branch(
    initial: RingPolymerState,
    perturbation: PerturbationSpec,
    plan: BranchPlan,
    spec: SystemSpec,
    field: ForceField,
    observables: list[str] = ("potential_energy",),
    branch_id: int = 0,
    recorders=(),
) -> list[EstimatorSample]:
    """
    Integrates one branch from a harvested snapshot and records the observables
    at t = 0 and every record_stride steps. recorders get
    record(step, state, integrator) at the same grid points.
    """
    try:
        state = launch_state(initial, plan, spec, branch_id)
        stream_id = plan.stream_ids[branch_id]

        base = BAOABIntegrator(spec, field, plan.thermostat, plan.branch_dt, state.n_beads, phase="branch")
        driven = BAOABIntegrator(
            spec,
            perturbation.force_field(field, spec.dimension),
            perturbation.thermostat(plan.thermostat, stream_id),
            plan.branch_dt,
            state.n_beads,
            phase="branch",
        )

        samples = [EstimatorSample(0.0, evaluate_observables(observables, state, driven.field, spec))]
        for step in range(1, plan.branch_length_steps + 1):
            integrator = driven if step > perturbation.switch_on_step else base
            integrator.step(state)
            if step % plan.record_stride == 0:
                values = evaluate_observables(observables, state, driven.field, spec)
                samples.append(EstimatorSample(step * plan.branch_dt, values))
                for recorder in recorders:
                    recorder.record(step, state, integrator)
        return samples
    except BranchError:
        raise
    except Exception as e:
        raise BranchError(branch_id, e) from e


class BranchManager:
    """
    Runs the branches of a plan on a thread pool.

    Results are merged by branch index, never by completion order, so the
    ensemble is identical for any worker count.
    """

    def __init__(
        self,
        plan: BranchPlan,
        spec: SystemSpec,
        field: ForceField,
        observables: list[str],
        max_workers: int = 1,
        recorder_factory=None,
        should_stop=None,
    ):
        self.logger = logging.getLogger(self.__class__.__name__)

        assert isinstance(plan, BranchPlan)
        assert isinstance(max_workers, int) and max_workers >= 1
        assert recorder_factory is None or callable(recorder_factory)

        validate_observables(observables, spec)

        self.plan = plan
        self.spec = spec
        self.field = field
        self.observables = list(observables)
        self.max_workers = max_workers
        self.recorder_factory = recorder_factory
        self.should_stop = should_stop
        self.recorders = []

    def _thread_run_branch(self, branch_id: int, initial: RingPolymerState, recorders: list):
        if self.should_stop is not None and self.should_stop():
            self.logger.warning(f"Skipping branch {branch_id}, run is terminating")
            branches_completed_counter.labels(status="skipped").inc()
            return None

        start = time.time()
        try:
            samples = run_branch(
                initial,
                self.plan.perturbation,
                self.plan,
                self.spec,
                self.field,
                self.observables,
                branch_id=branch_id,
                recorders=recorders,
            )
        except BranchError:
            branches_completed_counter.labels(status="failed").inc()
            raise
        branch_duration.observe(time.time() - start)
        branches_completed_counter.labels(status="ok").inc()
        self.logger.info(f"Branch {branch_id} finished in {time.time() - start:.2f}s")
        return samples

    def run(self, initial_states: list[RingPolymerState]) -> BranchEnsemble:
        assert len(initial_states) == self.plan.n_branches

        self.recorders = [
            [self.recorder_factory(branch_id)] if self.recorder_factory else []
            for branch_id in range(self.plan.n_branches)
        ]
        self.logger.info(
            f"Launching {self.plan.n_branches} branches on {self.max_workers} worker(s)"
        )
        with ThreadPoolExecutor(max_workers=self.max_workers) as executor:
            futures = [
                executor.submit(self._thread_run_branch, branch_id, initial, self.recorders[branch_id])
                for branch_id, initial in enumerate(initial_states)
            ]
            results = [future.result() for future in futures]

        if any(result is None for result in results):
            raise RunTerminatedError("run terminated before every branch finished")
        return BranchEnsemble(results)
