import logging

import numpy as np

from errors import DomainError

logger = logging.getLogger(__name__)

MIN_BLOCKS = 16


def statistical_inefficiency(series, min_blocks: int = MIN_BLOCKS) -> float:
    """
    Block-averaging estimate of g = 1 + 2 tau_int, in units of the sampling interval.

    Blocks of size 1, 2, 4, ... are formed while at least min_blocks of them fit;
    g is read at the largest such block size, b var(block means) / var(series).
    """
    series = np.asarray(series, dtype=float)
    variance = np.var(series)
    if len(series) < 2 * min_blocks or variance == 0.0:
        logger.debug(f"Series of {len(series)} points too short or constant, assuming g = 1")
        return 1.0

    estimate = 1.0
    block = 1
    while len(series) // block >= min_blocks:
        n_blocks = len(series) // block
        means = series[: n_blocks * block].reshape(n_blocks, block).mean(axis=1)
        estimate = block * np.var(means) / variance
        block *= 2
    return max(1.0, float(estimate))


def mean_with_error(series) -> tuple[float, float]:
    """Mean and its standard error corrected by the statistical inefficiency."""
    series = np.asarray(series, dtype=float)
    if len(series) == 0:
        raise DomainError("mean_with_error needs a non-empty series")
    if len(series) == 1:
        return float(series[0]), float("nan")
    inefficiency = statistical_inefficiency(series)
    return float(series.mean()), float(np.sqrt(np.var(series, ddof=1) * inefficiency / len(series)))


def correlation_series(a, b, max_lag: int) -> np.ndarray:
    """C(tau) = < a(t0) b(t0 + tau) > over all t0, tau = 0..max_lag in samples."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if len(a) != len(b):
        raise DomainError(f"series lengths differ: {len(a)} vs {len(b)}")
    if max_lag < 0 or max_lag >= len(a):
        raise DomainError(f"max_lag {max_lag} must lie in [0, {len(a) - 1}]")
    return np.array([np.mean(a[: len(a) - lag] * b[lag:]) for lag in range(max_lag + 1)])


def correlation_equilibrium(run, a: str, b: str, max_lag: int) -> list[tuple[float, float]]:
    """
    C_AB at lags 0..max_lag samples along one stationary trajectory.

    run is an EquilibriumRun or a list of EstimatorSample carrying both
    observables. Returns (lag time, C_AB) pairs.
    """
    samples = getattr(run, "samples", run)
    if max_lag >= len(samples):
        raise DomainError(f"max_lag {max_lag} must be shorter than the run ({len(samples)} samples)")

    values = correlation_series(
        [sample.values[a] for sample in samples],
        [sample.values[b] for sample in samples],
        max_lag,
    )
    origin = samples[0].time
    return [(samples[lag].time - origin, float(values[lag])) for lag in range(max_lag + 1)]
