from errors import ConfigurationError
from estimators import (
    bead_kinetic_temperature,
    centroid_kinetic_temperature,
    energy_estimator_primitive,
    energy_estimator_virial,
    estimator_position_observable,
    kinetic_energy,
)
from force_field import ForceField, spring_energy
from ring_polymer import RingPolymerState
from system import SystemSpec

# name -> fn(state, field, spec) -> float
OBSERVABLES = {}

# prefix -> factory(particle, axis) -> fn(state, field, spec) -> float
INDEXED_OBSERVABLES = {}


def register_observable(name: str):
    def decorator(fn):
        OBSERVABLES[name] = fn
        return fn

    return decorator


def register_indexed_observable(prefix: str):
    def decorator(factory):
        INDEXED_OBSERVABLES[prefix] = factory
        return factory

    return decorator


@register_observable("potential_energy")
def potential_energy(state, field, spec):
    energy, _ = field.evaluate(state.positions)
    return float(energy.mean())


@register_observable("kinetic_energy")
def kinetic(state, field, spec):
    return kinetic_energy(state, spec.mass_array)


@register_observable("spring_energy")
def springs(state, field, spec):
    return spring_energy(spec, state)


@register_observable("primitive_energy")
def primitive(state, field, spec):
    return energy_estimator_primitive(state, field, spec)


@register_observable("virial_energy")
def virial(state, field, spec):
    return energy_estimator_virial(state, field, spec)


@register_observable("bead_temperature")
def bead_temperature(state, field, spec):
    return bead_kinetic_temperature(state, spec.mass_array)


@register_observable("centroid_temperature")
def centroid_temperature(state, field, spec):
    return centroid_kinetic_temperature(state, spec.mass_array)


@register_indexed_observable("position")
def position(particle: int, axis: int):
    def observable(state, field, spec):
        return estimator_position_observable(state, lambda beads: beads[particle, axis])

    return observable


@register_indexed_observable("momentum")
def momentum(particle: int, axis: int):
    def observable(state, field, spec):
        return float(state.momenta[particle, :, axis].mean())

    return observable


@register_indexed_observable("velocity")
def velocity(particle: int, axis: int):
    def observable(state, field, spec):
        return float(state.momenta[particle, :, axis].mean()) / spec.masses[particle]

    return observable


def resolve_observable(name: str, spec: SystemSpec = None):
    """Looks up a plain name or a 'prefix:particle:axis' key."""
    if name in OBSERVABLES:
        return OBSERVABLES[name]

    prefix, _, rest = name.partition(":")
    if prefix not in INDEXED_OBSERVABLES or not rest:
        raise ConfigurationError(
            f"unknown observable '{name}', known: {sorted(OBSERVABLES) + [p + ':i:axis' for p in INDEXED_OBSERVABLES]}"
        )
    try:
        particle, axis = (int(part) for part in rest.split(":"))
    except ValueError:
        raise ConfigurationError(f"observable '{name}' must read '{prefix}:<particle>:<axis>'")
    if spec is not None and not (0 <= particle < spec.n_particles and 0 <= axis < spec.dimension):
        raise ConfigurationError(f"observable '{name}' is outside the system")
    return INDEXED_OBSERVABLES[prefix](particle, axis)


def evaluate_observables(
    names: list[str], state: RingPolymerState, field: ForceField, spec: SystemSpec
) -> dict:
    return {name: resolve_observable(name)(state, field, spec) for name in names}


def validate_observables(names: list[str], spec: SystemSpec = None):
    for name in names:
        resolve_observable(name, spec)
