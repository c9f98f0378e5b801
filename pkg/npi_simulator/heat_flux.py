import logging
import math

import numpy as np

from errors import ContractError, DomainError
from force_field import ForceField
from regions import RegionLayout, RegionRole
from ring_polymer import RingPolymerState
from system import SystemSpec

logger = logging.getLogger(__name__)


class FluxRecord:
    """
    Bead-averaged heat flux through one middle region.

    flux is per member particle; current is the energy per unit time crossing
    the region (summed flux over the region length). Positive means hot to cold.
    """

    def __init__(self, time: float, flux: float, region: int, current: float = 0.0):
        if not (math.isfinite(flux) and math.isfinite(current)):
            raise DomainError(f"flux of region {region} is not finite at time {time}")

        self.time = float(time)
        self.flux = float(flux)
        self.region = int(region)
        self.current = float(current)

    def __repr__(self):
        return f"FluxRecord[time={self.time}, flux={self.flux}, region={self.region}, current={self.current}]"


def atom_flux(state: RingPolymerState, field: ForceField, spec: SystemSpec, axis: int) -> np.ndarray:
    """
    Per-particle, per-bead flux contribution (N, P) along axis:

        e_i v_i + 1/2 sum_j (r_i - r_j) (F_ij . v_i)

    with e_i the kinetic energy plus half of every pair energy and the full well energy.
    """
    if field.has_angles:
        raise ContractError("heat flux is implemented for pair and bond potentials only")

    positions = state.positions
    masses = spec.mass_array[:, None, None]
    velocities = state.momenta / masses
    energies = np.sum(state.momenta**2 / (2.0 * masses), axis=-1) + field.particle_energies(positions)

    flux = energies * velocities[..., axis]
    for i, j, rij, f_i, _ in field.pair_terms(positions):
        power_i = np.sum(f_i * velocities[i], axis=-1)
        power_j = np.sum(-f_i * velocities[j], axis=-1)
        np.add.at(flux, i, -0.5 * rij[..., axis] * power_i)
        np.add.at(flux, j, 0.5 * rij[..., axis] * power_j)
    return flux


def heat_flux(
    state: RingPolymerState,
    field: ForceField,
    spec: SystemSpec,
    labels: np.ndarray,
    layout: RegionLayout,
) -> list[FluxRecord]:
    """One FluxRecord per middle region, bead-averaged, signed so that positive flows hot to cold."""
    per_atom = atom_flux(state, field, spec, layout.axis).mean(axis=1)
    lengths = layout.lengths()

    records = []
    for region in layout.regions_with(RegionRole.MIDDLE):
        members = labels == region
        total = layout.flux_sign(region) * float(per_atom[members].sum())
        count = int(members.sum())
        flux = total / count if count else 0.0
        records.append(FluxRecord(state.time, flux, region, total / lengths[region]))
    return records


class EnergyAudit:
    """
    Steady-state balance between the power the baths exchange and the heat
    current carried by the middle regions.
    """

    def __init__(self, bath_power: float, flux_power: float):
        self.bath_power = bath_power
        self.flux_power = flux_power

    @property
    def relative_error(self) -> float:
        if self.bath_power == 0.0:
            return math.inf if self.flux_power != 0.0 else 0.0
        return abs(self.flux_power - self.bath_power) / abs(self.bath_power)

    def __repr__(self):
        return (
            f"EnergyAudit[bath_power={self.bath_power:.6g}, flux_power={self.flux_power:.6g}, "
            f"relative_error={self.relative_error:.3g}]"
        )


def energy_audit(records: list[FluxRecord], heat: np.ndarray, duration: float, layout: RegionLayout) -> EnergyAudit:
    """
    heat[r] is the energy the bath of region r put in over duration. In steady
    state the hot baths inject what the cold baths remove, and that power leaves
    through the middle regions.
    """
    if not duration > 0:
        raise DomainError(f"duration must be positive, got {duration}")

    injected = sum(heat[region] for region in layout.regions_with(RegionRole.HOT))
    removed = -sum(heat[region] for region in layout.regions_with(RegionRole.COLD))
    bath_power = 0.5 * (injected + removed) / duration

    by_region = {}
    for record in records:
        by_region.setdefault(record.region, []).append(record.current)
    flux_power = float(sum(np.mean(currents) for currents in by_region.values()))

    audit = EnergyAudit(float(bath_power), flux_power)
    logger.info(f"Energy audit: {audit}")
    return audit
