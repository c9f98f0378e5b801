from enum import Enum

import numpy as np

from errors import DomainError


class ThermostatKind(Enum):
    NONE = "none"
    PILE_L = "pile_l"
    REGION_LANGEVIN = "region_langevin"

    @classmethod
    def _missing_(cls, value):
        if isinstance(value, str):
            for kind in ThermostatKind:
                if value.lower() == kind.value.lower():
                    return kind
        return super()._missing_(value)


class ThermostatSpec:
    """
    Which O step the integrator applies.

    none: pure Hamiltonian dynamics of the ring-polymer Hamiltonian.
    pile_l: per normal mode OU, centroid friction 1/tau, internal modes 2 omega_k.
    region_langevin: Cartesian bead OU on hot/cold regions of a RegionLayout;
        targets map region index -> (T, gamma).
    """

    def __init__(
        self,
        kind: ThermostatKind = ThermostatKind.NONE,
        tau: float = None,
        target_T: float = None,
        layout=None,
        targets: dict = None,
        stream_id: int = 0,
    ):
        kind = ThermostatKind(kind)
        assert isinstance(stream_id, int)

        match kind:
            case ThermostatKind.NONE:
                pass
            case ThermostatKind.PILE_L:
                if tau is None or not tau > 0:
                    raise DomainError(f"pile_l tau must be positive, got {tau}")
                if target_T is not None and not target_T > 0:
                    raise DomainError(f"pile_l target_T must be positive, got {target_T}")
            case ThermostatKind.REGION_LANGEVIN:
                if layout is None or not targets:
                    raise DomainError("region_langevin needs a layout and at least one target")
                for region, (temperature, gamma) in targets.items():
                    if not 0 <= region < layout.n_regions:
                        raise DomainError(f"region {region} outside layout")
                    if not temperature > 0 or gamma < 0:
                        raise DomainError(
                            f"region {region}: need T > 0 and gamma >= 0, got ({temperature}, {gamma})"
                        )

        self.kind = kind
        self.tau = tau
        self.target_T = target_T
        self.layout = layout
        self.targets = dict(targets or {})
        self.stream_id = stream_id

    @classmethod
    def none(cls, stream_id: int = 0) -> "ThermostatSpec":
        return cls(ThermostatKind.NONE, stream_id=stream_id)

    @classmethod
    def pile_l(cls, tau: float, target_T: float = None, stream_id: int = 0) -> "ThermostatSpec":
        return cls(ThermostatKind.PILE_L, tau=tau, target_T=target_T, stream_id=stream_id)

    @classmethod
    def region_langevin(cls, layout, targets: dict, stream_id: int = 0) -> "ThermostatSpec":
        return cls(ThermostatKind.REGION_LANGEVIN, layout=layout, targets=targets, stream_id=stream_id)

    def mode_frictions(self, mode_omega: np.ndarray) -> np.ndarray:
        """PILE-L friction per mode; mode_omega in absolute frequency units."""
        gammas = 2.0 * np.asarray(mode_omega, dtype=float)
        gammas[0] = 1.0 / self.tau
        return gammas

    def __repr__(self):
        return (
            f"ThermostatSpec[kind={self.kind.value}, tau={self.tau}, target_T={self.target_T}, "
            f"targets={self.targets}, stream_id={self.stream_id}]"
        )
