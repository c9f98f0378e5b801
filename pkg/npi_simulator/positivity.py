import logging

import numpy as np

from constants import POSITIVITY_TOLERANCE
from errors import DomainError
from metrics import positivity_violations_counter

logger = logging.getLogger(__name__)


class PositivityReport:
    """Eigenvalue, trace and purity diagnostics along one trajectory."""

    def __init__(self, times, min_eigenvalues, trace_deviations, purities, tolerance, first_violation=None):
        self.times = np.asarray(times, dtype=float)
        self.min_eigenvalues = np.asarray(min_eigenvalues, dtype=float)
        self.trace_deviations = np.asarray(trace_deviations, dtype=float)
        self.purities = np.asarray(purities, dtype=float)
        self.tolerance = tolerance
        self.first_violation = first_violation

        assert len(self.times) == len(self.min_eigenvalues) == len(self.trace_deviations) == len(self.purities)

    @property
    def violated(self) -> bool:
        return self.first_violation is not None

    def rows(self):
        for values in zip(self.times, self.min_eigenvalues, self.trace_deviations, self.purities):
            yield tuple(float(value) for value in values)

    def __repr__(self):
        return (
            f"PositivityReport[points={len(self.times)}, min={self.min_eigenvalues.min():.3g}, "
            f"first_violation={self.first_violation}]"
        )


def positivity_report(
    trajectory, tolerance: float = POSITIVITY_TOLERANCE, generator: str = "unknown"
) -> PositivityReport:
    """trajectory iterates (time, DensityMatrix) pairs; generator labels the violation metric."""
    points = list(trajectory)
    if not points:
        raise DomainError("positivity_report needs a non-empty trajectory")

    times = [time for time, _ in points]
    minima = [state.min_eigenvalue() for _, state in points]
    deviations = [state.trace_deviation() for _, state in points]
    purities = [state.purity() for _, state in points]

    first_violation = next((time for time, value in zip(times, minima) if value < -tolerance), None)
    if first_violation is not None:
        positivity_violations_counter.labels(generator=generator).inc()
        logger.info(f"Positivity violated from t = {first_violation:.6g}, min eigenvalue {min(minima):.3g}")
    return PositivityReport(times, minima, deviations, purities, tolerance, first_violation)
