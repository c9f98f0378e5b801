EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_RUNTIME = 2
TOOL_VERSION = "0.3.0"

# checkpoint layout
CHECKPOINT_MAGIC = b"NPI1"
CHECKPOINT_FORMAT_VERSION = 1

# potentials
LJ_OVERFLOW_THRESHOLD = 1e12

# integrator dt safety, in units of 1 / omega_max
DT_WARN_FACTOR = 0.5
DT_ERROR_FACTOR = 1.0

# master equation
MAX_HILBERT_DIM = 64
HERMITIAN_TOLERANCE = 1e-12
TRACE_TOLERANCE = 1e-12
TRACE_DRIFT_LIMIT = 1e-8
POSITIVITY_TOLERANCE = 1e-10
BOHR_MERGE_TOLERANCE = 1e-9
RK4_STABILITY_LIMIT = 2.5

# output
MANIFEST_FILE = "manifest.json"
METRICS_FILE = "metrics.prom"
CONFIG_FILE = "config.json"
WORKERS_ENV_KEY = "NPI_WORKERS"
