from prometheus_client import (
    CollectorRegistry,
    Counter,
    Gauge,
    Histogram,
    write_to_textfile,
)

registry = CollectorRegistry()

integration_steps_counter = Counter(
    "integration_steps",
    "Counts the BAOAB steps taken",
    labelnames=["phase"],
    namespace="npi",
    registry=registry,
)
force_evaluations_counter = Counter(
    "force_evaluations",
    "Counts the force field evaluations over all bead slices",
    namespace="npi",
    registry=registry,
)
branches_completed_counter = Counter(
    "branches_completed",
    "Counts the finished non-equilibrium branches",
    labelnames=["status"],
    namespace="npi",
    registry=registry,
)
branch_duration = Histogram(
    "branch_duration_seconds",
    "Wall time of a single branch trajectory",
    namespace="npi",
    registry=registry,
)
positivity_violations_counter = Counter(
    "positivity_violations",
    "Counts master-equation trajectories with a flagged positivity violation",
    labelnames=["generator"],
    namespace="npi",
    registry=registry,
)
run_status_gauge = Gauge(
    "run_status",
    "1 while a run is active, 0 when finished, -1 when failed",
    labelnames=["mode"],
    namespace="npi",
    registry=registry,
)
middle_temperature_gauge = Gauge(
    "middle_temperature",
    "Steady-state middle-region temperature of the last gradient run",
    labelnames=["n_beads"],
    namespace="npi",
    registry=registry,
)
heat_flux_gauge = Gauge(
    "heat_flux",
    "Steady-state heat flux of the last gradient run",
    labelnames=["n_beads"],
    namespace="npi",
    registry=registry,
)


def write_metrics(path: str):
    write_to_textfile(path, registry)
