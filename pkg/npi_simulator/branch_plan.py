import logging
from enum import Enum

import numpy as np

from errors import ConfigurationError, DomainError
from force_field import ForceField
from regions import RegionLayout, RegionRole
from thermostat import ThermostatSpec


class PerturbationKind(Enum):
    NONE = "none"
    THERMAL_GRADIENT = "thermal_gradient"
    CUSTOM_FORCE = "custom_force"

    @classmethod
    def _missing_(cls, value):
        if isinstance(value, str):
            for kind in PerturbationKind:
                if value.lower() == kind.value.lower():
                    return kind
        return super()._missing_(value)


class BranchMode(Enum):
    """How a branch obtains its thermostat noise and launch momenta."""

    FRESH = "fresh"
    CONTINUATION = "continuation"
    RESAMPLE = "resample"

    @classmethod
    def _missing_(cls, value):
        if isinstance(value, str):
            for mode in BranchMode:
                if value.lower() == mode.value.lower():
                    return mode
        return super()._missing_(value)


# name -> factory(dimension, **params) -> callable external field
CUSTOM_FORCES = {}


def register_custom_force(name: str):
    def decorator(factory):
        CUSTOM_FORCES[name] = factory
        return factory

    return decorator


@register_custom_force("uniform_field")
class UniformField:
    """Constant force F on the selected particles (all by default), U = -F . x."""

    def __init__(self, dimension: int, strength, particles=None):
        strength = np.broadcast_to(np.asarray(strength, dtype=float), (dimension,))
        if not np.all(np.isfinite(strength)):
            raise DomainError("uniform_field strength must be finite")

        self.strength = strength.copy()
        self.particles = None if particles is None else np.asarray(particles, dtype=int)

    def __call__(self, positions: np.ndarray):
        forces = np.zeros_like(positions)
        selected = slice(None) if self.particles is None else self.particles
        forces[selected] = self.strength
        energy = -np.einsum("nbd,d->b", positions[selected], self.strength)
        return energy, forces

    def __repr__(self):
        return f"UniformField[strength={self.strength.tolist()}, particles={self.particles}]"


def build_custom_force(name: str, dimension: int, params: dict):
    if name not in CUSTOM_FORCES:
        raise ConfigurationError(f"unknown custom force '{name}', known: {sorted(CUSTOM_FORCES)}")
    return CUSTOM_FORCES[name](dimension, **params)


class PerturbationSpec:
    """
    The non-equilibrium drive a branch runs under.

    thermal_gradient couples hot and cold regions of the layout to Langevin
    baths at t_hot and t_cold (friction gamma); custom_force adds a registered
    external force field on every bead slice. The drive is switched on after
    switch_on_step branch steps (0 means from the first step).
    """

    def __init__(
        self,
        kind=PerturbationKind.NONE,
        layout: RegionLayout = None,
        t_hot: float = None,
        t_cold: float = None,
        gamma: float = 1.0,
        force: str = None,
        force_params: dict = None,
        switch_on_step: int = 0,
    ):
        kind = PerturbationKind(kind)
        assert isinstance(switch_on_step, int) and switch_on_step >= 0

        match kind:
            case PerturbationKind.NONE:
                pass
            case PerturbationKind.THERMAL_GRADIENT:
                if layout is None:
                    raise DomainError("thermal_gradient needs a region layout")
                if t_hot is None or t_cold is None or not t_cold > 0:
                    raise DomainError(f"thermal_gradient needs t_cold > 0, got {t_cold}")
                if t_hot < t_cold:
                    raise DomainError(f"thermal_gradient needs t_hot >= t_cold, got {t_hot} < {t_cold}")
                if not layout.regions_with(RegionRole.HOT) or not layout.regions_with(RegionRole.COLD):
                    raise DomainError("thermal_gradient layout needs hot and cold regions")
                if gamma < 0:
                    raise DomainError(f"bath friction must be >= 0, got {gamma}")
            case PerturbationKind.CUSTOM_FORCE:
                if force is None:
                    raise DomainError("custom_force needs a registered force name")
                if force not in CUSTOM_FORCES:
                    raise ConfigurationError(f"unknown custom force '{force}'")

        self.kind = kind
        self.layout = layout
        self.t_hot = t_hot
        self.t_cold = t_cold
        self.gamma = gamma
        self.force = force
        self.force_params = dict(force_params or {})
        self.switch_on_step = switch_on_step

    def bath_targets(self) -> dict:
        targets = {region: (self.t_hot, self.gamma) for region in self.layout.regions_with(RegionRole.HOT)}
        targets.update(
            {region: (self.t_cold, self.gamma) for region in self.layout.regions_with(RegionRole.COLD)}
        )
        return targets

    def thermostat(self, base: ThermostatSpec, stream_id: int) -> ThermostatSpec:
        if self.kind == PerturbationKind.THERMAL_GRADIENT:
            return ThermostatSpec.region_langevin(self.layout, self.bath_targets(), stream_id=stream_id)
        return base

    def force_field(self, field: ForceField, dimension: int) -> ForceField:
        if self.kind == PerturbationKind.CUSTOM_FORCE:
            return field.with_external(build_custom_force(self.force, dimension, self.force_params))
        return field

    def __repr__(self):
        return (
            f"PerturbationSpec[kind={self.kind.value}, t_hot={self.t_hot}, t_cold={self.t_cold}, "
            f"gamma={self.gamma}, force={self.force}, switch_on_step={self.switch_on_step}]"
        )


class BranchPlan:
    """
    Attributes:
        n_branches: number of branched trajectories
        spacing_steps: equilibrium steps between harvest points
        branch_length_steps: steps per branch
        branch_dt: branch time step
        perturbation: PerturbationSpec
        record_stride: branch steps between recorded grid points
        stream_ids: one distinct noise stream id per branch
        mode: BranchMode
        seed: seed of the branch noise streams
        thermostat: thermostat used outside the perturbation (none if omitted)
    """

    def __init__(
        self,
        n_branches: int,
        spacing_steps: int,
        branch_length_steps: int,
        branch_dt: float,
        perturbation: PerturbationSpec = None,
        record_stride: int = 1,
        stream_ids: list[int] = None,
        mode: BranchMode = BranchMode.FRESH,
        seed: int = 0,
        thermostat: ThermostatSpec = None,
    ):
        self.logger = logging.getLogger(self.__class__.__name__)

        for name, value in (
            ("n_branches", n_branches),
            ("spacing_steps", spacing_steps),
            ("branch_length_steps", branch_length_steps),
            ("record_stride", record_stride),
        ):
            if not isinstance(value, int) or value < 1:
                raise DomainError(f"{name} must be a positive integer, got {value}")
        if not branch_dt > 0:
            raise DomainError(f"branch_dt must be positive, got {branch_dt}")

        if stream_ids is None:
            stream_ids = [index + 1 for index in range(n_branches)]
        stream_ids = [int(stream_id) for stream_id in stream_ids]
        if len(stream_ids) != n_branches:
            raise DomainError(f"{n_branches} branches need {n_branches} stream ids, got {len(stream_ids)}")
        if len(set(stream_ids)) != len(stream_ids):
            raise DomainError(f"branch stream ids must be distinct: {stream_ids}")

        self.n_branches = n_branches
        self.spacing_steps = spacing_steps
        self.branch_length_steps = branch_length_steps
        self.branch_dt = float(branch_dt)
        self.perturbation = perturbation or PerturbationSpec()
        self.record_stride = record_stride
        self.stream_ids = stream_ids
        self.mode = BranchMode(mode)
        self.seed = int(seed)
        self.thermostat = thermostat or ThermostatSpec.none()

        if self.mode == BranchMode.RESAMPLE:
            self.logger.warning("Momentum resampling at branch launch is experimental")

    def grid(self) -> np.ndarray:
        """Branch-relative recording times t_m, including t = 0."""
        steps = np.arange(0, self.branch_length_steps + 1, self.record_stride)
        return steps * self.branch_dt

    def __repr__(self):
        return (
            f"BranchPlan[n_branches={self.n_branches}, spacing={self.spacing_steps}, "
            f"length={self.branch_length_steps}, dt={self.branch_dt}, mode={self.mode.value}, "
            f"perturbation={self.perturbation}]"
        )
