import numpy as np

from force_field import ForceField
from heat_flux import FluxRecord, heat_flux
from regions import RegionLayout, RegionRole, assign_regions
from system import SystemSpec
from temperature_profile import ProfileAccumulator, ProfileMode


class ThermalRecorder:
    """
    Per-branch bookkeeping of a thermal-gradient branch.

    Middle-region temperature and flux are kept at every grid point (for the
    steady-state detector); the profile, the flux averages and the bath heat
    only over the production window, steps > production_start.
    """

    def __init__(
        self,
        spec: SystemSpec,
        field: ForceField,
        layout: RegionLayout,
        n_bins: int,
        mode: ProfileMode,
        production_start: int,
        span=None,
    ):
        self.spec = spec
        self.field = field
        self.layout = layout
        self.production_start = production_start
        self.middle = layout.regions_with(RegionRole.MIDDLE)
        self.profile = ProfileAccumulator(layout, n_bins, mode, spec.mass_array, span)

        self.times = []
        self.middle_temperatures = []
        self.fluxes = []
        self.region_fluxes = []
        self.production_fluxes: list[FluxRecord] = []
        self.heat_start = None
        self.heat = np.zeros(layout.n_regions)
        self.production_origin = 0.0
        self.production_time = 0.0

    def record(self, step, state, integrator):
        labels = assign_regions(self.layout, state)
        records = heat_flux(state, self.field, self.spec, labels, self.layout)

        members = np.isin(labels, self.middle)
        momenta = state.momenta[members]
        masses = self.spec.mass_array[members][:, None, None]
        dof = momenta.size
        temperature = float(np.sum(momenta**2 / masses)) / dof if dof else float("nan")

        self.times.append(state.time)
        self.middle_temperatures.append(temperature)
        self.fluxes.append(float(np.mean([record.flux for record in records])))
        self.region_fluxes.append([record.flux for record in records])

        ledger = integrator.region_thermostat
        if step <= self.production_start:
            if ledger is not None:
                self.heat_start = ledger.heat.copy()
            self.production_origin = state.time
            return

        self.profile.add(state)
        self.production_fluxes.extend(records)
        if ledger is not None:
            start = self.heat_start if self.heat_start is not None else np.zeros(self.layout.n_regions)
            self.heat = ledger.heat - start
        self.production_time = state.time - self.production_origin

    def production_temperature(self) -> float:
        production = [
            value
            for time, value in zip(self.times, self.middle_temperatures)
            if time > self.production_origin
        ]
        return float(np.nanmean(production)) if production else float("nan")

    def production_flux(self) -> float:
        if not self.production_fluxes:
            return float("nan")
        return float(np.mean([record.flux for record in self.production_fluxes]))
