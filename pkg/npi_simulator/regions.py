import logging
from enum import Enum

import numpy as np

from errors import ConfigurationError, DomainError
from random_stream import RandomStream
from ring_polymer import RingPolymerState


class RegionRole(Enum):
    HOT = "hot"
    COLD = "cold"
    MIDDLE = "middle"

    @classmethod
    def _missing_(cls, value):
        if isinstance(value, str):
            for role in RegionRole:
                if value.lower() == role.value.lower():
                    return role
        return super()._missing_(value)


class RegionLayout:
    """
    Contiguous intervals tiling one periodic axis.

    edges has one entry more than roles; interval r is [edges[r], edges[r + 1])
    and edges[-1] - edges[0] equals the box length along the axis.
    """

    def __init__(self, axis: int, edges, roles, box_length: float):
        assert isinstance(axis, int)

        edges = np.asarray(edges, dtype=float)
        roles = [RegionRole(role) for role in roles]

        if len(edges) != len(roles) + 1:
            raise DomainError(f"{len(roles)} regions need {len(roles) + 1} edges, got {len(edges)}")
        if np.any(np.diff(edges) <= 0):
            raise DomainError(f"region edges must be strictly increasing: {edges.tolist()}")
        if not np.isclose(edges[-1] - edges[0], box_length, rtol=0.0, atol=1e-12 * box_length):
            raise DomainError(
                f"regions span {edges[-1] - edges[0]}, box length along axis {axis} is {box_length}"
            )

        self.axis = axis
        self.edges = edges
        self.roles = roles
        self.box_length = float(box_length)

    @classmethod
    def symmetric(cls, box_length: float, axis: int = 0, hot_fraction: float = 0.5, origin: float = 0.0):
        """hot / middle / cold / middle / hot, each hot interval hot_fraction as wide as the others."""
        if not hot_fraction > 0:
            raise DomainError(f"hot_fraction must be positive, got {hot_fraction}")
        width = box_length / (3.0 + 2.0 * hot_fraction)
        hot = hot_fraction * width
        edges = origin + np.array([0.0, hot, hot + width, hot + 2 * width, hot + 3 * width, box_length])
        roles = [RegionRole.HOT, RegionRole.MIDDLE, RegionRole.COLD, RegionRole.MIDDLE, RegionRole.HOT]
        return cls(axis, edges, roles, box_length)

    @property
    def n_regions(self) -> int:
        return len(self.roles)

    def regions_with(self, role: RegionRole) -> list[int]:
        return [index for index, value in enumerate(self.roles) if value == role]

    def lengths(self) -> np.ndarray:
        return np.diff(self.edges)

    def wrap(self, coordinate: np.ndarray) -> np.ndarray:
        """Coordinate along the axis mapped into [0, box_length) relative to the first edge."""
        return np.mod(coordinate - self.edges[0], self.box_length)

    def flux_sign(self, region: int) -> float:
        """+1 when the bath preceding the region along +axis is hot, so that positive means hot to cold."""
        for offset in range(1, self.n_regions):
            role = self.roles[(region - offset) % self.n_regions]
            if role == RegionRole.HOT:
                return 1.0
            if role == RegionRole.COLD:
                return -1.0
        return 1.0

    def to_dict(self) -> dict:
        return {
            "axis": self.axis,
            "edges": self.edges.tolist(),
            "roles": [role.value for role in self.roles],
            "box_length": self.box_length,
        }

    def __repr__(self):
        return (
            f"RegionLayout[axis={self.axis}, edges={np.round(self.edges, 6).tolist()}, "
            f"roles={[role.value for role in self.roles]}]"
        )


def assign_regions(layout: RegionLayout, state: RingPolymerState) -> np.ndarray:
    """
    Region label per particle from its ring centroid.

    A centroid sitting exactly on an interior edge belongs to the lower-indexed interval.
    """
    coordinate = layout.wrap(state.centroid()[:, layout.axis])
    offsets = layout.edges - layout.edges[0]
    labels = np.searchsorted(offsets, coordinate, side="left") - 1
    return np.clip(labels, 0, layout.n_regions - 1)


class RegionThermostat:
    """
    Langevin baths on hot and cold regions acting on Cartesian bead momenta.

    heat[r] accumulates the bead-averaged kinetic energy the bath of region r
    put into the system (negative when it removed energy).
    """

    def __init__(self, layout: RegionLayout, targets: dict, masses: np.ndarray):
        self.logger = logging.getLogger(self.__class__.__name__)

        for region in targets:
            if layout.roles[region] == RegionRole.MIDDLE:
                raise ConfigurationError(f"region {region} is a middle region and takes no thermostat")

        self.layout = layout
        self.targets = dict(targets)
        self.masses = np.asarray(masses, dtype=float)
        self.heat = np.zeros(layout.n_regions)

    def reset_heat(self):
        self.heat = np.zeros(self.layout.n_regions)

    def apply(self, state: RingPolymerState, labels: np.ndarray, dt: float, rng: RandomStream):
        # one draw per call keeps the stream position independent of the labels
        noise = rng.normal(state.momenta.shape)
        mass = self.masses[:, None, None]

        for region, (temperature, gamma) in self.targets.items():
            if gamma == 0:
                continue
            members = labels == region
            if not np.any(members):
                continue
            c1 = np.exp(-gamma * dt)
            c2 = np.sqrt(1.0 - c1**2)
            before = state.momenta[members]
            after = c1 * before + c2 * np.sqrt(mass[members] * temperature) * noise[members]
            state.momenta[members] = after
            self.heat[region] += np.sum((after**2 - before**2) / (2.0 * mass[members])) / state.n_beads
        return state


def apply_region_thermostats(
    state: RingPolymerState,
    labels: np.ndarray,
    layout: RegionLayout,
    targets: dict,
    dt: float,
    rng: RandomStream,
    masses=None,
) -> RingPolymerState:
    """targets maps region index -> (T, gamma); middle regions must not appear. Unit masses by default."""
    masses = np.ones(state.n_particles) if masses is None else masses
    return RegionThermostat(layout, targets, masses).apply(state, labels, dt, rng)
