import logging
import math

import numpy as np

from errors import DomainError
from potentials.base_potential import PotentialKind, PotentialTerm
from utils import content_hash, float_list


class SystemSpec:
    """Physical system: particles, box, inverse temperature and the declared topology.

    Reduced units throughout: k_B = 1, hbar configurable (default 1).

    Attributes:
        n_particles: N.
        masses: one positive mass per particle.
        dimension: 1, 2 or 3.
        box_length: side length per axis.
        periodic: periodic flag per axis.
        beta: inverse temperature 1/T.
        hbar: reduced Planck constant.
        topology: bonded terms and nonbonded pair rules.
    """

    def __init__(
        self,
        n_particles: int,
        masses,
        dimension: int,
        box_length,
        periodic,
        beta: float,
        hbar: float = 1.0,
        topology: list[PotentialTerm] = (),
    ):
        self.logger = logging.getLogger(self.__class__.__name__)

        assert isinstance(n_particles, int)
        assert isinstance(dimension, int)

        if n_particles < 1:
            raise DomainError(f"n_particles must be >= 1, got {n_particles}")
        if dimension not in (1, 2, 3):
            raise DomainError(f"dimension must be 1, 2 or 3, got {dimension}")

        masses = float_list(np.broadcast_to(np.asarray(masses, dtype=float), (n_particles,)))
        if any(not (mass > 0 and math.isfinite(mass)) for mass in masses):
            raise DomainError("all masses must be positive and finite")

        box_length = float_list(np.broadcast_to(np.asarray(box_length, dtype=float), (dimension,)))
        if any(not (length > 0 and math.isfinite(length)) for length in box_length):
            raise DomainError("box lengths must be positive and finite")
        periodic = [bool(flag) for flag in np.broadcast_to(np.asarray(periodic, dtype=bool), (dimension,))]

        if not (beta > 0 and math.isfinite(beta)):
            raise DomainError(f"beta must be positive, got {beta}")
        if not (hbar > 0 and math.isfinite(hbar)):
            raise DomainError(f"hbar must be positive, got {hbar}")

        topology = list(topology)
        seen = set()
        for term in topology:
            assert isinstance(term, PotentialTerm)
            if any(index >= n_particles or index < 0 for index in term.members):
                raise DomainError(f"{term} references a particle outside 0..{n_particles - 1}")
            if term.kind == PotentialKind.EXTERNAL_WELL and len(term.params["center"]) != dimension:
                raise DomainError(f"{term} center does not match dimension {dimension}")
            if term.kind == PotentialKind.HARMONIC_ANGLE and dimension == 1:
                raise DomainError("harmonic_angle needs dimension >= 2")
            if term.is_bonded:
                if term.key() in seen:
                    raise DomainError(f"duplicate bonded term over {term.members}")
                seen.add(term.key())

        self.n_particles = n_particles
        self.masses = tuple(masses)
        self.dimension = dimension
        self.box_length = tuple(box_length)
        self.periodic = tuple(periodic)
        self.beta = float(beta)
        self.hbar = float(hbar)
        self.topology = tuple(topology)

    @property
    def temperature(self) -> float:
        return 1.0 / self.beta

    @property
    def mass_array(self) -> np.ndarray:
        return np.array(self.masses)

    def to_dict(self) -> dict:
        return {
            "n_particles": self.n_particles,
            "masses": list(self.masses),
            "dimension": self.dimension,
            "box_length": list(self.box_length),
            "periodic": list(self.periodic),
            "beta": self.beta,
            "hbar": self.hbar,
            "topology": [term.to_dict() for term in self.topology],
        }

    @classmethod
    def from_dict(cls, document: dict) -> "SystemSpec":
        return cls(
            n_particles=int(document["n_particles"]),
            masses=document["masses"],
            dimension=int(document["dimension"]),
            box_length=document["box_length"],
            periodic=document["periodic"],
            beta=float(document["beta"]),
            hbar=float(document.get("hbar", 1.0)),
            topology=[PotentialTerm.from_dict(term) for term in document.get("topology", [])],
        )

    def spec_hash(self) -> bytes:
        return content_hash(self.to_dict())

    def with_beta(self, beta: float) -> "SystemSpec":
        document = self.to_dict()
        document["beta"] = beta
        return SystemSpec.from_dict(document)

    def __eq__(self, other):
        if isinstance(other, SystemSpec):
            return self.to_dict() == other.to_dict()
        return False

    def __repr__(self):
        return (
            f"SystemSpec[N={self.n_particles}, d={self.dimension}, beta={self.beta}, "
            f"hbar={self.hbar}, box={self.box_length}, terms={len(self.topology)}]"
        )
