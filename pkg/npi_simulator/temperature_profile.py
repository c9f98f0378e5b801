import logging
from enum import Enum

import numpy as np

from errors import DomainError
from regions import RegionLayout
from ring_polymer import RingPolymerState

logger = logging.getLogger(__name__)


class ProfileMode(Enum):
    BEAD_KINETIC = "bead_kinetic"
    CENTROID_KINETIC = "centroid_kinetic"

    @classmethod
    def _missing_(cls, value):
        if isinstance(value, str):
            for mode in ProfileMode:
                if value.lower() == mode.value.lower():
                    return mode
        return super()._missing_(value)


class ProfileBin:
    """temperature is None for a bin that never held a particle."""

    def __init__(self, center: float, temperature: float, count: int):
        self.center = float(center)
        self.temperature = None if temperature is None else float(temperature)
        self.count = int(count)

    def __eq__(self, other):
        if isinstance(other, ProfileBin):
            return (self.center, self.temperature, self.count) == (other.center, other.temperature, other.count)
        return False

    def __repr__(self):
        return f"ProfileBin[center={self.center}, temperature={self.temperature}, count={self.count}]"


class ProfileAccumulator:
    """
    Running per-bin sums of 2 K and degrees of freedom, binned by ring centroid
    along the layout axis over [span_start, span_end) measured from the first edge.
    """

    def __init__(self, layout: RegionLayout, n_bins: int, mode: ProfileMode, masses, span=None):
        assert isinstance(n_bins, int)
        if n_bins < 1:
            raise DomainError(f"n_bins must be >= 1, got {n_bins}")

        start, end = span if span is not None else (0.0, layout.box_length)
        if not 0.0 <= start < end <= layout.box_length:
            raise DomainError(f"profile span ({start}, {end}) outside the box")

        self.layout = layout
        self.n_bins = n_bins
        self.mode = ProfileMode(mode)
        self.masses = np.asarray(masses, dtype=float)
        self.start = float(start)
        self.width = (float(end) - float(start)) / n_bins

        self.twice_kinetic = np.zeros(n_bins)
        self.dof = np.zeros(n_bins)
        self.counts = np.zeros(n_bins, dtype=int)

    def add(self, state: RingPolymerState):
        coordinate = self.layout.wrap(state.centroid()[:, self.layout.axis]) - self.start
        bins = np.floor(coordinate / self.width).astype(int)
        inside = (bins >= 0) & (bins < self.n_bins)

        match self.mode:
            case ProfileMode.BEAD_KINETIC:
                twice_kinetic = np.sum(state.momenta**2, axis=(1, 2)) / self.masses
                dof = np.full(state.n_particles, state.n_beads * state.dimension)
            case ProfileMode.CENTROID_KINETIC:
                total = state.momenta.sum(axis=1)
                twice_kinetic = np.sum(total**2, axis=1) / (state.n_beads * self.masses)
                dof = np.full(state.n_particles, state.dimension)

        np.add.at(self.twice_kinetic, bins[inside], twice_kinetic[inside])
        np.add.at(self.dof, bins[inside], dof[inside])
        np.add.at(self.counts, bins[inside], 1)

    def merge(self, other: "ProfileAccumulator"):
        self.twice_kinetic += other.twice_kinetic
        self.dof += other.dof
        self.counts += other.counts

    def bins(self) -> list[ProfileBin]:
        result = []
        for index in range(self.n_bins):
            center = self.layout.edges[0] + self.start + (index + 0.5) * self.width
            if self.counts[index] == 0:
                result.append(ProfileBin(center, None, 0))
            else:
                temperature = self.twice_kinetic[index] / self.dof[index]
                result.append(ProfileBin(center, temperature, self.counts[index]))
        empty = sum(1 for profile_bin in result if profile_bin.count == 0)
        if empty:
            logger.warning(f"{empty} of {self.n_bins} profile bins are empty")
        return result


def temperature_profile(
    states: list[RingPolymerState],
    layout: RegionLayout,
    n_bins: int,
    mode,
    masses,
    span=None,
) -> list[ProfileBin]:
    """T_bin = 2 <K_bin> / dof_bin over post-warm-up snapshots."""
    accumulator = ProfileAccumulator(layout, n_bins, mode, masses, span)
    for state in states:
        accumulator.add(state)
    return accumulator.bins()
