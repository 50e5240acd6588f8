"""Annual well-to-wheel CO2 by energy pathway, and range gained per minute of refuelling."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .errors import ZevsiteError

BEV_GRID_G_PER_KWH = 386.0


@dataclass(frozen=True)
class EnergyPathway:
    name: str
    carbon_intensity: float  # g CO2 per dispensed unit
    unit: str = "kWh"
    illustrative: bool = False

    def __post_init__(self):
        if not self.carbon_intensity >= 0:
            raise ZevsiteError(f"pathway {self.name!r}: intensity must be >= 0")


# Only the grid value is a published figure; the rest are placeholders chosen
# to keep the usual ordering of pathways on a per-mile basis.
EXAMPLE_PATHWAYS = (
    EnergyPathway("diesel", 12_500.0, "gal", True),
    EnergyPathway("bev_grid", BEV_GRID_G_PER_KWH, "kWh", False),
    EnergyPathway("h2_smr", 11_000.0, "kg", True),
    EnergyPathway("h2_smr_ccs", 4_000.0, "kg", True),
    EnergyPathway("h2_grid_electrolysis", 25_000.0, "kg", True),
    EnergyPathway("h2_solar_electrolysis", 0.0, "kg", True),
)

# per-mile consumption for the example powertrains, keyed by store unit
EXAMPLE_CONSUMPTION = {"gal": 1 / 5.5, "kWh": 1.5625, "kg": 0.10}

# (powertrain, replenish rate, unit, miles per unit)
EXAMPLE_REFUEL = (
    ("diesel", 50.0, "gal/min", 5.5),
    ("bev_150kW", 2.5, "kWh/min", 0.64),
    ("bev_1250kW", 1250 / 60, "kWh/min", 0.64),
    ("bev_3750kW", 62.5, "kWh/min", 0.64),
    ("fcev_1.8kg_min", 1.8, "kg/min", 10.0),
    ("fcev_10kg_min", 10.0, "kg/min", 10.0),
)


def co2_annual(vmt: float, consumption: float, pathway: EnergyPathway) -> float:
    """Tonnes of CO2 per year."""
    if vmt < 0 or consumption < 0:
        raise ZevsiteError("vmt and consumption must be non-negative")
    return vmt * consumption * pathway.carbon_intensity / 1e6


def refuel_rate(replenish_rate: float, economy: float) -> float:
    """Miles of range gained per minute at the pump or charger."""
    if not (replenish_rate > 0 and economy > 0):
        raise ZevsiteError("replenish rate and economy must be positive")
    return replenish_rate * economy


@dataclass(frozen=True)
class ImpactRow:
    pathway: EnergyPathway
    vmt: float
    consumption: float

    @property
    def energy(self) -> float:
        return self.vmt * self.consumption

    @property
    def co2_tonnes(self) -> float:
        return co2_annual(self.vmt, self.consumption, self.pathway)


@dataclass(frozen=True)
class ImpactReport:
    rows: tuple[ImpactRow, ...]

    @property
    def illustrative(self) -> bool:
        return any(r.pathway.illustrative for r in self.rows)

    def table(self) -> list[dict]:
        return [{
            "pathway": r.pathway.name, "intensity": r.pathway.carbon_intensity,
            "intensity_unit": f"g/{r.pathway.unit}", "vmt": r.vmt, "consumption": r.consumption,
            "co2_tonnes_per_yr": r.co2_tonnes,
        } for r in self.rows]


def impact_report(vmt: float, pathways: Sequence[EnergyPathway], consumption: dict | None = None) -> ImpactReport:
    """Same VMT for every pathway; consumption looked up by the pathway's store unit."""
    consumption = consumption or EXAMPLE_CONSUMPTION
    return ImpactReport(tuple(ImpactRow(p, vmt, consumption[p.unit]) for p in pathways))


def pathway_ranking(report: ImpactReport) -> list[str]:
    """Pathway names, highest emitter first (ties by name)."""
    rows = sorted(report.rows, key=lambda r: (-(r.consumption * r.pathway.carbon_intensity), r.pathway.name))
    return [r.pathway.name for r in rows]


def load_pathways(path) -> list[EnergyPathway]:
    data = json.loads(Path(path).read_text())
    try:
        return [EnergyPathway(d["name"], float(d["carbon_intensity"]), d.get("unit", "kWh"),
                              bool(d.get("illustrative", False))) for d in data]
    except (KeyError, TypeError, ValueError) as e:
        raise ZevsiteError(f"bad pathway file {path}: {e}") from None
