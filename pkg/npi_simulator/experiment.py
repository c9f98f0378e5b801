import logging
import math

import numpy as np

from branch_manager import BranchManager, harvest_initial_conditions
from branch_plan import PerturbationKind
from checkpoint import save_checkpoint
from constants import CONFIG_FILE, METRICS_FILE
from correlation import correlation_equilibrium, mean_with_error
from ensemble import BranchEnsemble, branch_correlation, npi_average
from errors import InsufficientDataError, RunTerminatedError
from estimators import harmonic_energy_finite_p, harmonic_energy_quantum
from experiment_config import ExperimentConfig, Mode, render
from force_field import ForceField
from heat_flux import energy_audit
from lifecycle import Lifecycle
from manifest import RunManifest, RunStatus
from metrics import heat_flux_gauge, middle_temperature_gauge, run_status_gauge, write_metrics
from output import OutputWriter
from positivity import positivity_report
from propagator import evolve
from random_stream import RandomStream
from redfield import ViolationScan, secular_reduce
from regions import RegionRole
from ring_polymer import initial_state
from sampling import EquilibriumSampler
from steady_state import steady_state_detector
from temperature_profile import ProfileAccumulator, ProfileMode
from thermal_recorder import ThermalRecorder


def relative_error(value: float, reference: float) -> float:
    return abs(value - reference) / abs(reference)


def across_branches(values) -> tuple[float, float]:
    """Mean and standard error over independent branches."""
    values = np.asarray(values, dtype=float)
    if len(values) < 2:
        return float(values.mean()), float("nan")
    return float(values.mean()), float(values.std(ddof=1) / math.sqrt(len(values)))


def npi_average_file(n_beads: int, observable: str) -> str:
    return f"npi_average_P{n_beads}_{observable.replace(':', '_')}.csv"


def trajectory_rows(trajectory, report):
    dim = trajectory.states[0].dim
    header = ["time"]
    for row in range(dim):
        for column in range(dim):
            header += [f"rho_{row}{column}_re", f"rho_{row}{column}_im"]
    header += ["min_eigenvalue", "trace_deviation", "purity"]

    rows = []
    for index, (time, state) in enumerate(trajectory):
        entries = state.entries.reshape(-1)
        values = [float(time)]
        for entry in entries:
            values += [float(entry.real), float(entry.imag)]
        values += [
            float(report.min_eigenvalues[index]),
            float(report.trace_deviations[index]),
            float(report.purities[index]),
        ]
        rows.append(values)
    return header, rows


class ExperimentManager:
    """
    Executes the pipeline of one experiment mode.

    Sweeps run their P values in order, each with seed hash(seed, P). Results
    are emitted through the single OutputWriter of the run and one summary
    dict per sub-run is appended to summaries as soon as it is complete.
    """

    def __init__(self, config: ExperimentConfig, writer: OutputWriter, workers: int = 1, should_stop=None):
        self.logger = logging.getLogger(self.__class__.__name__)

        assert isinstance(config, ExperimentConfig)
        assert isinstance(workers, int) and workers >= 1

        self.config = config
        self.writer = writer
        self.workers = workers
        self.should_stop = should_stop
        self.summaries = []

    def run(self) -> list[dict]:
        self.logger.info(f"Running {self.config}")
        try:
            match self.config.mode:
                case Mode.EQUILIBRIUM:
                    self.run_equilibrium()
                case Mode.OSCILLATOR_BENCHMARK:
                    self.run_oscillator_benchmark()
                case Mode.NPI_GRADIENT:
                    self.run_npi_gradient()
                case Mode.LINDBLAD:
                    self.run_lindblad()
                case Mode.REDFIELD:
                    self.run_redfield()
        except RunTerminatedError as e:
            self.logger.warning(f"Stopped early: {e}")
        return self.summaries

    def _stopping(self) -> bool:
        return self.should_stop is not None and self.should_stop()

    def _sweep(self):
        for n_beads, seed in self.config.sweep():
            if self._stopping():
                raise RunTerminatedError(f"terminated before the P = {n_beads} sub-run")
            self.logger.info(f"Sub-run P = {n_beads}, seed {seed}")
            yield n_beads, seed

    def _checkpoint(self, state, spec, n_beads: int):
        self.writer.write_with(f"checkpoint_P{n_beads}.bin", lambda path: save_checkpoint(state, spec, path))

    def _sampler(self, spec, field, n_beads: int, observables, snapshot_stride: int = None) -> EquilibriumSampler:
        sampling = self.config.section("sampling")
        return EquilibriumSampler(
            spec,
            field,
            self.config.thermostat(),
            sampling["dt"],
            observables,
            sample_stride=sampling["sample_stride"],
            snapshot_stride=snapshot_stride,
            n_warmup=sampling["n_warmup"],
            n_beads=n_beads,
        )

    def _write_npi_average(self, ensemble: BranchEnsemble, n_beads: int, reference=None) -> dict:
        """
        One npi_average_P<P>_<observable>.csv per observable. With reference
        {name: (mean, stderr)} the equilibrium mean is appended as a last column
        and the agreement fraction is returned.
        """
        agreement = {}
        for name in ensemble.observables():
            rows = []
            within = []
            equilibrium = reference.get(name) if reference else None
            for time, mean, error in npi_average(ensemble, name):
                rows.append([time, mean, error, ensemble.n_branches, equilibrium[0] if equilibrium else None])
                if equilibrium:
                    combined = math.sqrt(error**2 + equilibrium[1] ** 2)
                    within.append(abs(mean - equilibrium[0]) <= 3.0 * combined)
            if within:
                agreement[f"{name}_agreement"] = float(np.mean(within))
            self.writer.write_csv(
                npi_average_file(n_beads, name),
                ["t", "mean", "stderr", "n_branches", "equilibrium_mean"],
                rows,
            )
        return agreement

    # equilibrium

    def run_equilibrium(self):
        spec = self.config.system_spec()
        field = ForceField.from_spec(spec)
        positions = self.config.positions(spec)
        branches = self.config.section("branches")

        observables = list(self.config.section("sampling")["observables"])
        if branches:
            observables += [name for name in branches["observables"] if name not in observables]

        for n_beads, seed in self._sweep():
            state = initial_state(spec, n_beads, positions, RandomStream(seed, 0))
            sampler = self._sampler(spec, field, n_beads, observables, branches["spacing_steps"] if branches else None)
            run = sampler.run(state, self.config.section("sampling")["n_steps"])

            names = sampler.observables
            self.writer.write_csv(
                f"equilibrium_P{n_beads}.csv",
                ["time"] + names,
                [[sample.time] + [sample.values[name] for name in names] for sample in run.samples],
            )
            self._checkpoint(run.final_state, spec, n_beads)

            summary = {"n_beads": n_beads, "seed": seed}
            reference = {}
            for name in names:
                mean, error = mean_with_error(run.series(name))
                summary[name] = mean
                summary[f"{name}_stderr"] = error
                reference[name] = (mean, error)

            if branches:
                summary.update(self._equilibrium_branches(run, spec, field, seed, n_beads, reference))
            self.summaries.append(summary)

    def _equilibrium_branches(self, run, spec, field, seed, n_beads, reference) -> dict:
        branches = self.config.section("branches")
        perturbation = self.config.perturbation()
        plan = self.config.branch_plan(seed, perturbation)

        initials = harvest_initial_conditions(run, plan)
        manager = BranchManager(
            plan, spec, field, branches["observables"], self.workers, should_stop=self.should_stop
        )
        ensemble = manager.run(initials)

        summary = self._write_npi_average(
            ensemble, n_beads, reference if perturbation.kind == PerturbationKind.NONE else None
        )
        if branches["correlations"]:
            self._write_correlations(run, ensemble, plan, n_beads)
        return summary

    def _write_correlations(self, run, ensemble, plan, n_beads: int):
        sampling = self.config.section("sampling")
        sample_interval = sampling["sample_stride"] * sampling["dt"]
        record_interval = plan.record_stride * plan.branch_dt
        aligned = math.isclose(sample_interval, record_interval, rel_tol=1e-12)
        max_lag = len(ensemble.grid) - 1
        if not aligned or max_lag >= len(run.samples):
            self.logger.warning(
                "Single-trajectory correlation skipped: sample interval "
                f"{sample_interval} vs branch record interval {record_interval}, {len(run.samples)} samples"
            )

        rows = []
        for a, b in self.config.section("branches")["correlations"]:
            trajectory = None
            if aligned and max_lag < len(run.samples):
                trajectory = [value for _, value in correlation_equilibrium(run, a, b, max_lag)]
            for index, (time, mean, error) in enumerate(branch_correlation(ensemble, a, b)):
                rows.append([a, b, time, mean, error, trajectory[index] if trajectory else None])
        self.writer.write_csv(
            f"correlations_P{n_beads}.csv",
            ["a", "b", "time", "branch_mean", "branch_stderr", "trajectory"],
            rows,
        )

    # oscillator benchmark

    def run_oscillator_benchmark(self):
        oscillator = self.config.section("oscillator")
        spec = self.config.oscillator_spec()
        field = ForceField.from_spec(spec)
        quantum = harmonic_energy_quantum(oscillator["beta"], oscillator["hbar"], oscillator["omega"])

        rows = []
        for n_beads, seed in self._sweep():
            state = initial_state(spec, n_beads, np.zeros((1, 1)), RandomStream(seed, 0))
            sampler = self._sampler(spec, field, n_beads, ["primitive_energy", "virial_energy"])
            run = sampler.run(state, self.config.section("sampling")["n_steps"])
            self._checkpoint(run.final_state, spec, n_beads)

            finite = harmonic_energy_finite_p(oscillator["beta"], oscillator["hbar"], oscillator["omega"], n_beads)
            primitive, primitive_error = mean_with_error(run.series("primitive_energy"))
            virial, virial_error = mean_with_error(run.series("virial_energy"))

            passed = (
                relative_error(primitive, finite) <= oscillator["tolerance_finite_p"]
                and relative_error(virial, finite) <= oscillator["tolerance_finite_p"]
            )
            quantum_passed = relative_error(virial, quantum) <= oscillator["tolerance_quantum"]
            if not passed:
                self.logger.warning(
                    f"P = {n_beads}: estimators {primitive:.5f} / {virial:.5f} miss the finite-P value {finite:.5f}"
                )

            rows.append(
                [
                    n_beads,
                    primitive,
                    primitive_error,
                    virial,
                    virial_error,
                    finite,
                    quantum,
                    virial - quantum,
                    passed,
                    quantum_passed,
                ]
            )
            self.summaries.append(
                {
                    "n_beads": n_beads,
                    "seed": seed,
                    "primitive_energy": primitive,
                    "virial_energy": virial,
                    "finite_p_energy": finite,
                    "quantum_energy": quantum,
                    "quantum_error": virial - quantum,
                    "passed": passed,
                    "quantum_passed": quantum_passed,
                }
            )

        self.writer.write_csv(
            "oscillator_energy.csv",
            [
                "n_beads",
                "primitive",
                "primitive_stderr",
                "virial",
                "virial_stderr",
                "finite_p_exact",
                "quantum_exact",
                "quantum_error",
                "passed",
                "quantum_passed",
            ],
            rows,
        )

    # thermal gradient

    def run_npi_gradient(self):
        setup = self.config.chain_setup()
        spec, field, layout = setup.spec, setup.field, setup.layout
        branches = self.config.section("branches")
        profile = self.config.section("profile")
        perturbation = self.config.perturbation(layout)
        production_start = int(round(branches["branch_length_steps"] * (1.0 - branches["production_fraction"])))

        def recorder_factory(branch_id):
            return ThermalRecorder(
                spec, field, layout, profile["n_bins"], ProfileMode(profile["mode"]), production_start
            )

        for n_beads, seed in self._sweep():
            state = initial_state(spec, n_beads, setup.positions, RandomStream(seed, 0))
            sampler = self._sampler(
                spec, field, n_beads, self.config.section("sampling")["observables"], branches["spacing_steps"]
            )
            run = sampler.run(state, self.config.section("sampling")["n_steps"])
            self._checkpoint(run.final_state, spec, n_beads)

            plan = self.config.branch_plan(seed, perturbation)
            manager = BranchManager(
                plan,
                spec,
                field,
                branches["observables"],
                self.workers,
                recorder_factory=recorder_factory,
                should_stop=self.should_stop,
            )
            ensemble = manager.run(harvest_initial_conditions(run, plan))
            recorders = [group[0] for group in manager.recorders]

            self._write_npi_average(ensemble, n_beads)
            summary = {"n_beads": n_beads, "seed": seed}
            summary.update(self._thermal_outputs(recorders, layout, n_beads, perturbation))
            self.summaries.append(summary)

    def _thermal_outputs(self, recorders: list[ThermalRecorder], layout, n_beads: int, perturbation) -> dict:
        profile = self.config.section("profile")

        merged = ProfileAccumulator(
            layout, profile["n_bins"], ProfileMode(profile["mode"]), recorders[0].spec.mass_array
        )
        for recorder in recorders:
            merged.merge(recorder.profile)
        self.writer.write_csv(
            f"profile_P{n_beads}.csv",
            ["bin_center", "temperature", "count", "mode"],
            [
                [profile_bin.center, profile_bin.temperature, profile_bin.count, merged.mode.value]
                for profile_bin in merged.bins()
            ],
        )

        times = recorders[0].times
        temperatures = np.array([recorder.middle_temperatures for recorder in recorders])
        fluxes = np.array([recorder.fluxes for recorder in recorders])
        # (branch, time, middle region)
        region_fluxes = np.array([recorder.region_fluxes for recorder in recorders])
        regions = layout.regions_with(RegionRole.MIDDLE)

        flux_rows = []
        temperature_rows = []
        for index, time in enumerate(times):
            for column, region in enumerate(regions):
                flux, flux_error = across_branches(region_fluxes[:, index, column])
                flux_rows.append([time, flux, region, flux_error])
            temperature, temperature_error = across_branches(temperatures[:, index])
            temperature_rows.append([time, temperature, temperature_error])
        self.writer.write_csv(f"flux_P{n_beads}.csv", ["time", "flux", "region", "flux_stderr"], flux_rows)
        self.writer.write_csv(
            f"middle_temperature_P{n_beads}.csv", ["time", "temperature", "stderr"], temperature_rows
        )

        try:
            steady = steady_state_detector(
                times,
                {"temperature": temperatures.mean(axis=0), "flux": fluxes.mean(axis=0)},
                profile["steady_window"],
                profile["steady_tolerance"],
            )
        except InsufficientDataError as e:
            self.logger.warning(f"Steady-state detection skipped: {e}")
            steady = None

        middle_temperature, middle_temperature_error = across_branches(
            [recorder.production_temperature() for recorder in recorders]
        )
        flux, flux_error = across_branches([recorder.production_flux() for recorder in recorders])
        middle_temperature_gauge.labels(n_beads=str(n_beads)).set(middle_temperature)
        heat_flux_gauge.labels(n_beads=str(n_beads)).set(flux)

        summary = {
            "middle_temperature": middle_temperature,
            "middle_temperature_stderr": middle_temperature_error,
            "flux": flux,
            "flux_stderr": flux_error,
            "steady": bool(steady) if steady is not None else None,
            "steady_onset": steady.onset_time if steady is not None else None,
        }

        duration = float(np.mean([recorder.production_time for recorder in recorders]))
        if perturbation.kind == PerturbationKind.THERMAL_GRADIENT and duration > 0:
            audit = energy_audit(
                [record for recorder in recorders for record in recorder.production_fluxes],
                np.mean([recorder.heat for recorder in recorders], axis=0),
                duration,
                layout,
            )
            summary.update(
                {
                    "bath_power": audit.bath_power,
                    "flux_power": audit.flux_power,
                    "audit_relative_error": audit.relative_error,
                }
            )
        self.logger.info(
            f"P = {n_beads}: middle temperature {middle_temperature:.4f} +- {middle_temperature_error:.4f}, "
            f"flux {flux:.5g} +- {flux_error:.2g}"
        )
        return summary

    # master equations

    def _evolve_and_report(self, gen, rho0, name: str, label: str) -> dict:
        evolution = self.config.section("evolution")
        trajectory = evolve(gen, rho0, evolution["t_final"], evolution["dt"], evolution["record_every"])
        report = positivity_report(trajectory, evolution["tolerance"], label)
        header, rows = trajectory_rows(trajectory, report)
        self.writer.write_csv(name, header, rows)
        return {
            "generator": label,
            "min_eigenvalue": float(report.min_eigenvalues.min()),
            "first_violation": report.first_violation,
            "max_trace_deviation": float(report.trace_deviations.max()),
            "final_purity": float(report.purities[-1]),
        }

    def run_lindblad(self):
        gen = self.config.lindblad_generator()
        rho0 = self.config.initial_density(gen.hamiltonian)
        self.summaries.append(self._evolve_and_report(gen, rho0, "lindblad_trajectory.csv", "lindblad"))

    def run_redfield(self):
        redfield = self.config.section("redfield")
        gen, case_density = self.config.redfield_generator()
        rho0 = self.config.initial_density(gen.hamiltonian) if self.config.has("initial_density") else case_density

        self.summaries.append(self._evolve_and_report(gen, rho0, "redfield_trajectory.csv", "redfield"))
        if redfield["secular"]:
            self.summaries.append(
                self._evolve_and_report(secular_reduce(gen), rho0, "secular_trajectory.csv", "secular")
            )

        scan = redfield.get("scan")
        if scan:
            evolution = self.config.section("evolution")
            results = ViolationScan(
                scan.get("t_final", evolution["t_final"]),
                scan.get("dt", evolution["dt"]),
                evolution["tolerance"],
                self.workers,
            ).run(
                scan["angles"],
                scan["thetas"],
                scan.get("phis", [0.0]),
                redfield.get("omega0", 1.0),
                redfield.get("gamma", 1.0),
                redfield["alpha2"],
            )
            self.writer.write_csv(
                "redfield_scan.csv",
                ["angle", "theta", "phi", "min_eigenvalue", "first_violation"],
                [
                    [row["angle"], row["theta"], row["phi"], row["min_eigenvalue"], row["first_violation"]]
                    for row in results
                ],
            )
            self.summaries.append(
                {
                    "generator": "redfield_scan",
                    "configurations": len(results),
                    "violations": sum(1 for row in results if row["first_violation"] is not None),
                    "min_eigenvalue": min(row["min_eigenvalue"] for row in results),
                }
            )


def run_experiment(config: ExperimentConfig) -> RunManifest:
    """
    Runs one experiment under a Lifecycle: the manifest is written before the
    pipeline starts and finalized after it ends, also when it fails.
    """
    logger = logging.getLogger(__name__)

    manifest = RunManifest(config.config_hash(), config.physics_hash(), config.mode.value, config.seed)
    writer = OutputWriter(config.output_dir, manifest)
    lifecycle = Lifecycle()
    manager = ExperimentManager(config, writer, config.workers, lifecycle.should_stop)
    manifest.summaries = manager.summaries

    def startup():
        run_status_gauge.labels(mode=config.mode.value).set(1)
        writer.write_text(CONFIG_FILE, render(config))
        writer.write_manifest()

    def pipeline():
        manager.run()

    def shutdown():
        status = RunStatus(lifecycle.status)
        run_status_gauge.labels(mode=config.mode.value).set(0 if status == RunStatus.OK else -1)
        writer.write_with(METRICS_FILE, write_metrics)
        manifest.finalize(status, str(lifecycle.error) if lifecycle.error is not None else None)
        writer.write_manifest()
        logger.info(f"Run finished with status {status.value}; outputs in {config.output_dir}")

    with lifecycle:
        lifecycle.on_startup(startup)
        lifecycle.run(pipeline)
        lifecycle.on_shutdown(shutdown)
    return manifest
