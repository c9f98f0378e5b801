import logging

import numpy as np

from errors import DomainError, InsufficientDataError

logger = logging.getLogger(__name__)


class SteadyState:
    def __init__(self, steady: bool, onset_time: float = None, window_index: int = None):
        self.steady = steady
        self.onset_time = onset_time
        self.window_index = window_index

    def __bool__(self):
        return self.steady

    def __repr__(self):
        return f"SteadyState[steady={self.steady}, onset_time={self.onset_time}, window={self.window_index}]"


def steady_state_detector(times, series: dict, window: int, tolerance: float) -> SteadyState:
    """
    Splits every series into consecutive windows of `window` points and declares
    steady state at the first window whose mean differs from the next window's
    mean by at most tolerance times the largest window mean magnitude of that
    series, for every series at once. The onset is the start time of that window.
    """
    times = np.asarray(times, dtype=float)
    if not isinstance(window, int) or window < 1:
        raise DomainError(f"window must be a positive integer, got {window}")
    if not tolerance > 0:
        raise DomainError(f"tolerance must be positive, got {tolerance}")

    columns = {name: np.asarray(values, dtype=float) for name, values in series.items()}
    for name, values in columns.items():
        if len(values) != len(times):
            raise DomainError(f"series {name} has {len(values)} points, times have {len(times)}")

    n_windows = len(times) // window
    if n_windows < 2:
        raise InsufficientDataError(
            f"{len(times)} points hold {n_windows} window(s) of {window}; need at least 2"
        )

    means = {
        name: values[: n_windows * window].reshape(n_windows, window).mean(axis=1)
        for name, values in columns.items()
    }
    scales = {name: float(np.max(np.abs(mean))) for name, mean in means.items()}
    for index in range(n_windows - 1):
        if all(
            abs(mean[index + 1] - mean[index]) <= tolerance * scales[name] for name, mean in means.items()
        ):
            onset = float(times[index * window])
            logger.debug(f"Steady state from window {index}, t = {onset}")
            return SteadyState(True, onset, index)
    return SteadyState(False)
