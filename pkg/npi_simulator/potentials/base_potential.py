import logging
import math
from enum import Enum

import numpy as np


class PotentialKind(Enum):
    HARMONIC_BOND = "harmonic_bond"
    MORSE = "morse"
    LENNARD_JONES = "lennard_jones"
    HARMONIC_ANGLE = "harmonic_angle"
    EXTERNAL_WELL = "external_well"

    @classmethod
    def _missing_(cls, value):
        if isinstance(value, str):
            for kind in PotentialKind:
                if value.lower() == kind.value.lower():
                    return kind
        return super()._missing_(value)


# parameter names and member counts per kind; external_well takes one or more members
KIND_PARAMETERS = {
    PotentialKind.HARMONIC_BOND: ("k", "r0"),
    PotentialKind.MORSE: ("D", "a", "r0"),
    PotentialKind.LENNARD_JONES: ("epsilon", "sigma", "cutoff"),
    PotentialKind.HARMONIC_ANGLE: ("k_theta", "theta0"),
    PotentialKind.EXTERNAL_WELL: ("k_ext", "center"),
}
KIND_MEMBERS = {
    PotentialKind.HARMONIC_BOND: 2,
    PotentialKind.MORSE: 2,
    PotentialKind.LENNARD_JONES: 2,
    PotentialKind.HARMONIC_ANGLE: 3,
    PotentialKind.EXTERNAL_WELL: None,
}


class PotentialTerm:
    """A single declared interaction: its kind, parameters and member particle indices."""

    def __init__(self, kind, members, **params):
        kind = PotentialKind(kind)
        members = tuple(int(index) for index in members)

        expected = KIND_PARAMETERS[kind]
        missing = [name for name in expected if name not in params]
        unknown = [name for name in params if name not in expected]
        if missing or unknown:
            raise ValueError(
                f"{kind.value} expects parameters {expected}, missing {missing}, unknown {unknown}"
            )

        n_members = KIND_MEMBERS[kind]
        if n_members is not None and len(members) != n_members:
            raise ValueError(
                f"{kind.value} takes {n_members} members, got {len(members)}"
            )
        if len(members) == 0:
            raise ValueError(f"{kind.value} needs at least one member")
        if n_members is not None and len(set(members)) != len(members):
            raise ValueError(f"{kind.value} members must be distinct: {members}")

        values = {}
        for name, value in params.items():
            if name == "center":
                value = tuple(float(component) for component in np.atleast_1d(value))
                finite = all(math.isfinite(component) for component in value)
            else:
                value = float(value)
                finite = math.isfinite(value)
            if not finite:
                raise ValueError(f"{kind.value} parameter {name} is not finite")
            values[name] = value
        if kind == PotentialKind.LENNARD_JONES and values["cutoff"] <= 0:
            raise ValueError("Lennard-Jones cutoff must be positive")

        self.kind = kind
        self.members = members
        self.params = values

    @property
    def is_bonded(self) -> bool:
        return self.kind in (
            PotentialKind.HARMONIC_BOND,
            PotentialKind.MORSE,
            PotentialKind.HARMONIC_ANGLE,
        )

    def key(self) -> tuple:
        """Order-insensitive identity of the particle tuple a bonded term spans."""
        if self.kind == PotentialKind.HARMONIC_ANGLE:
            return (self.kind, min(self.members, self.members[::-1]))
        return (self.kind, tuple(sorted(self.members)))

    def to_dict(self) -> dict:
        params = {
            name: list(value) if isinstance(value, tuple) else value
            for name, value in self.params.items()
        }
        return {"kind": self.kind.value, "members": list(self.members), "params": params}

    @classmethod
    def from_dict(cls, document: dict) -> "PotentialTerm":
        return cls(document["kind"], document["members"], **document["params"])

    def __eq__(self, other):
        if isinstance(other, PotentialTerm):
            return self.to_dict() == other.to_dict()
        return False

    def __hash__(self):
        return hash((self.kind, self.members, tuple(sorted(self.params))))

    def __repr__(self):
        return f"PotentialTerm[kind={self.kind.value}, members={self.members}, params={self.params}]"


def minimum_image(displacement: np.ndarray, box_length: np.ndarray, periodic: np.ndarray):
    """Wraps displacement vectors (last axis = dimension) into the nearest periodic image."""
    if not periodic.any():
        return displacement
    shift = np.where(periodic, box_length * np.rint(displacement / box_length), 0.0)
    return displacement - shift


class BasePotential:
    """Vectorized evaluator for every term of one kind.

    Positions come in as (N, B, d) arrays, B being the number of bead slices
    evaluated together. Only same-index slices are ever combined.
    """

    kind = None

    def __init__(self, terms: list[PotentialTerm], box_length, periodic):
        self.logger = logging.getLogger(self.__class__.__name__)

        assert all(term.kind == self.kind for term in terms)

        self.terms = list(terms)
        self.box_length = np.asarray(box_length, dtype=float)
        self.periodic = np.asarray(periodic, dtype=bool)
        if KIND_MEMBERS[self.kind] is not None:
            self.members = np.array(
                [term.members for term in terms], dtype=int
            ).reshape(len(terms), KIND_MEMBERS[self.kind])

    def parameter(self, name: str) -> np.ndarray:
        return np.array([term.params[name] for term in self.terms], dtype=float)

    def displacement(self, positions: np.ndarray, i: np.ndarray, j: np.ndarray):
        """r_ij = x_j - x_i under minimum image, shape (terms, B, d)."""
        return minimum_image(positions[j] - positions[i], self.box_length, self.periodic)

    def evaluate(self, positions: np.ndarray):
        """Returns (energy per slice (B,), forces (N, B, d))."""
        raise NotImplementedError()

    def pair_forces(self, positions: np.ndarray):
        """Returns (i, j, r_ij, F_ij on i, energy per term) for flux bookkeeping."""
        raise NotImplementedError()
