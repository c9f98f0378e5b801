import math

import numpy as np

from errors import DomainError
from random_stream import RandomStream
from system import SystemSpec


def omega_p(beta: float, hbar: float, n_beads: int) -> float:
    """Ring-polymer spring frequency sqrt(P) / (beta hbar)."""
    if not (beta > 0 and hbar > 0 and n_beads > 0):
        raise DomainError(
            f"omega_p needs positive inputs, got beta={beta}, hbar={hbar}, P={n_beads}"
        )
    return math.sqrt(n_beads) / (beta * hbar)


def next_bead(j: int, n_beads: int) -> int:
    """Cyclic closure: the neighbour of the last bead is the first one."""
    return (j + 1) % n_beads


def previous_bead(j: int, n_beads: int) -> int:
    return (j - 1) % n_beads


class RingPolymerState:
    """Phase-space point of N ring polymers with P beads each.

    Arrays have shape (N, P, d). The state owns the thermostat noise stream so
    that a snapshot carries its exact random-stream position (rng_cursor).
    Positions are never wrapped into the box; minimum image is applied at
    force evaluation so ring springs stay continuous.
    """

    def __init__(
        self,
        positions: np.ndarray,
        momenta: np.ndarray,
        rng: RandomStream,
        time: float = 0.0,
        step: int = 0,
    ):
        positions = np.array(positions, dtype=float)
        momenta = np.array(momenta, dtype=float)

        assert isinstance(rng, RandomStream)

        if positions.ndim != 3 or positions.shape != momenta.shape:
            raise DomainError(
                f"positions {positions.shape} and momenta {momenta.shape} must share shape (N, P, d)"
            )
        if positions.shape[1] < 1:
            raise DomainError("n_beads must be >= 1")
        if not (np.all(np.isfinite(positions)) and np.all(np.isfinite(momenta))):
            raise DomainError("state arrays must be finite")
        if time < 0:
            raise DomainError(f"time must be nonnegative, got {time}")

        self.positions = positions
        self.momenta = momenta
        self.rng = rng
        self.time = float(time)
        self.step = int(step)
        self.forces = None

    @property
    def n_particles(self) -> int:
        return self.positions.shape[0]

    @property
    def n_beads(self) -> int:
        return self.positions.shape[1]

    @property
    def dimension(self) -> int:
        return self.positions.shape[2]

    @property
    def rng_cursor(self) -> dict:
        return self.rng.cursor()

    def centroid(self) -> np.ndarray:
        return self.positions.mean(axis=1)

    def bead_slice(self, j: int) -> np.ndarray:
        return self.positions[:, j % self.n_beads, :]

    def velocities(self, masses: np.ndarray) -> np.ndarray:
        return self.momenta / masses[:, None, None]

    def copy(self) -> "RingPolymerState":
        clone = RingPolymerState(
            self.positions.copy(),
            self.momenta.copy(),
            self.rng.copy(),
            time=self.time,
            step=self.step,
        )
        if self.forces is not None:
            clone.forces = self.forces.copy()
        return clone

    def same_as(self, other: "RingPolymerState") -> bool:
        """Bit-exact equality, random stream position included."""
        return (
            self.positions.shape == other.positions.shape
            and self.positions.tobytes() == other.positions.tobytes()
            and self.momenta.tobytes() == other.momenta.tobytes()
            and self.time == other.time
            and self.step == other.step
            and self.rng == other.rng
        )

    def __repr__(self):
        return (
            f"RingPolymerState[N={self.n_particles}, P={self.n_beads}, d={self.dimension}, "
            f"time={self.time}, step={self.step}, rng={self.rng}]"
        )


def thermal_momenta(spec: SystemSpec, n_beads: int, rng: RandomStream, temperature: float = None):
    """Maxwell-Boltzmann bead momenta with variance m T per component."""
    temperature = spec.temperature if temperature is None else temperature
    sigma = np.sqrt(spec.mass_array * temperature)[:, None, None]
    return sigma * rng.normal((spec.n_particles, n_beads, spec.dimension))


def initial_state(
    spec: SystemSpec,
    n_beads: int,
    positions: np.ndarray,
    rng: RandomStream,
    thermalize_momenta: bool = True,
) -> RingPolymerState:
    """Collapsed rings at the given (N, d) positions, momenta drawn at the system temperature."""
    positions = np.asarray(positions, dtype=float).reshape(spec.n_particles, spec.dimension)
    beads = np.repeat(positions[:, None, :], n_beads, axis=1)
    if thermalize_momenta:
        momenta = thermal_momenta(spec, n_beads, rng)
    else:
        momenta = np.zeros_like(beads)
    return RingPolymerState(beads, momenta, rng)
