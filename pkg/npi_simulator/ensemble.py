import math

import numpy as np

from errors import AlignmentError, DomainError
from sampling import EstimatorSample


class BranchEnsemble:
    """Per-branch EstimatorSample series on one shared time grid, ordered by branch index."""

    def __init__(self, branches: list[list[EstimatorSample]]):
        if not branches:
            raise DomainError("an ensemble needs at least one branch")

        grid = [sample.time for sample in branches[0]]
        for index, series in enumerate(branches):
            times = [sample.time for sample in series]
            if times != grid:
                raise AlignmentError(
                    f"branch {index} has {len(times)} grid points misaligned with branch 0 ({len(grid)})"
                )

        self.branches = branches
        self.grid = np.array(grid)

    @property
    def n_branches(self) -> int:
        return len(self.branches)

    def observables(self) -> list[str]:
        return sorted(self.branches[0][0].values) if self.branches[0] else []

    def values(self, name: str) -> np.ndarray:
        """(n_branches, n_times) array of one observable."""
        return np.array([[sample.values[name] for sample in series] for series in self.branches])

    def __repr__(self):
        return f"BranchEnsemble[n_branches={self.n_branches}, grid_points={len(self.grid)}]"


def npi_average(ensemble: BranchEnsemble, observable: str) -> list[tuple[float, float, float]]:
    """(t_m, mean over branches, standard error across branches) at every grid point."""
    if ensemble.n_branches < 2:
        raise DomainError(f"npi_average needs >= 2 branches, got {ensemble.n_branches}")

    values = ensemble.values(observable)
    means = values.mean(axis=0)
    errors = values.std(axis=0, ddof=1) / math.sqrt(ensemble.n_branches)
    return [
        (float(time), float(mean), float(error))
        for time, mean, error in zip(ensemble.grid, means, errors)
    ]


def branch_correlation(ensemble: BranchEnsemble, a: str, b: str) -> list[tuple[float, float, float]]:
    """
    C_AB(t_m) = mean over branches of A(t_0) B(t_m), with the across-branch standard error.

    With perturbation none this is the branch-ensemble form of the equilibrium
    correlation function.
    """
    if ensemble.n_branches < 2:
        raise DomainError(f"branch_correlation needs >= 2 branches, got {ensemble.n_branches}")

    products = ensemble.values(a)[:, :1] * ensemble.values(b)
    means = products.mean(axis=0)
    errors = products.std(axis=0, ddof=1) / math.sqrt(ensemble.n_branches)
    return [
        (float(time), float(mean), float(error))
        for time, mean, error in zip(ensemble.grid, means, errors)
    ]
