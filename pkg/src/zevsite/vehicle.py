"""Parametric energy model for fuel-cell, battery-electric and diesel reference trucks.

Every class is described by an energy store (kg H2, nameplate kWh, or
gallons), the usable and reserve fractions of that store, a per-mile
consumption and a replenishment rate in store units per minute. Charger
power in kW is held as ``kW / 60`` kWh per minute so that hydrogen and
battery classes share one replenishment path.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path
from types import MappingProxyType
from typing import Mapping

from .errors import AmountExceedsCapacity, InvalidVehicleClass, NonPositiveInputs

ENERGY_TOL = 1e-9

# Example defaults, calibrated so that 10 kg/min gives 100 mi/min of range and
# a 3750 kW charger gives 40 mi/min.
FCEV_KG_PER_MILE = 0.10
BEV_KWH_PER_MILE = 1.5625
FCEV_RESERVE = 0.20
BEV_USABLE = 0.80
BEV_RESERVE = 0.15
DEFAULT_REFERENCE_WEIGHT_LB = 33_000.0


class Kind(str, enum.Enum):
    FCEV = "FCEV"
    BEV = "BEV"
    DIESEL_REF = "DIESEL_REF"

    @property
    def unit(self) -> str:
        return {"FCEV": "kg", "BEV": "kWh", "DIESEL_REF": "gal"}[self.value]


@dataclass(frozen=True)
class VehicleClass:
    class_id: str
    kind: Kind
    capacity: float
    usable_fraction: float
    reserve_fraction: float
    base_consumption: float
    replenish_rate: float
    weight_sensitivity: float = 0.0
    reference_weight: float = DEFAULT_REFERENCE_WEIGHT_LB

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        bad = []
        if not self.capacity > 0:
            bad.append("capacity must be > 0")
        if not 0 < self.usable_fraction <= 1:
            bad.append("usable_fraction must be in (0, 1]")
        if not 0 <= self.reserve_fraction < 1:
            bad.append("reserve_fraction must be in [0, 1)")
        if not self.base_consumption > 0:
            bad.append("base_consumption must be > 0")
        if not self.replenish_rate > 0:
            bad.append("replenish_rate must be > 0")
        if not self.reference_weight > 0:
            bad.append("reference_weight must be > 0")
        if not bad and self.usable_fraction <= self.reserve_fraction:
            bad.append("usable_fraction must exceed reserve_fraction (empty driving window)")
        if bad:
            raise InvalidVehicleClass(f"vehicle class {self.class_id!r}: " + "; ".join(bad))

    @property
    def unit(self) -> str:
        return self.kind.unit

    @property
    def effective_full(self) -> float:
        return self.usable_fraction * self.capacity

    @property
    def floor(self) -> float:
        return self.reserve_fraction * self.capacity

    @property
    def window(self) -> float:
        return self.effective_full - self.floor

    @property
    def charger_kw(self) -> float:
        """Replenishment rate expressed as power; meaningful for BEV classes."""
        return self.replenish_rate * 60.0

    def to_dict(self) -> dict:
        d = asdict(self)
        d["kind"] = self.kind.value
        d["capacity_unit"] = self.unit
        d["consumption_per_mile"] = d.pop("base_consumption")
        d["replenish_rate_per_min"] = d.pop("replenish_rate")
        d["reference_weight_lb"] = d.pop("reference_weight")
        return d

    @classmethod
    def from_dict(cls, d: Mapping) -> "VehicleClass":
        try:
            return cls(
                class_id=str(d["class_id"]),
                kind=Kind(d["kind"]),
                capacity=float(d["capacity"]),
                usable_fraction=float(d.get("usable_fraction", 1.0)),
                reserve_fraction=float(d.get("reserve_fraction", 0.0)),
                base_consumption=float(d["consumption_per_mile"]),
                replenish_rate=float(d["replenish_rate_per_min"]),
                weight_sensitivity=float(d.get("weight_sensitivity", 0.0)),
                reference_weight=float(d.get("reference_weight_lb", DEFAULT_REFERENCE_WEIGHT_LB)),
            )
        except KeyError as e:
            raise InvalidVehicleClass(f"vehicle class is missing field {e.args[0]!r}") from None
        except (TypeError, ValueError) as e:
            if isinstance(e, InvalidVehicleClass):
                raise
            raise InvalidVehicleClass(f"vehicle class {d.get('class_id')!r}: {e}") from None


def fcev(capacity_kg: float, dispenser_kg_min: float = 10.0, *, class_id: str | None = None,
         kg_per_mile: float = FCEV_KG_PER_MILE, reserve: float = FCEV_RESERVE, **kw) -> VehicleClass:
    """Hydrogen truck: the whole tank is usable and 20% is held in reserve."""
    return VehicleClass(class_id or f"fcev_{capacity_kg:g}kg", Kind.FCEV, capacity_kg, 1.0, reserve,
                        kg_per_mile, dispenser_kg_min, **kw)


def bev(nameplate_kwh: float, charger_kw: float = 1250.0, *, class_id: str | None = None,
        kwh_per_mile: float = BEV_KWH_PER_MILE, usable: float = BEV_USABLE,
        reserve: float = BEV_RESERVE, **kw) -> VehicleClass:
    """Battery truck: usable window is 80% of nameplate, recharge below 15% of nameplate."""
    return VehicleClass(class_id or f"bev_{nameplate_kwh:g}kwh", Kind.BEV, nameplate_kwh, usable, reserve,
                        kwh_per_mile, charger_kw / 60.0, **kw)


def diesel_reference(tank_gal: float = 200.0, flow_gal_min: float = 50.0, mpg: float = 5.5,
                     class_id: str = "diesel_ref") -> VehicleClass:
    return VehicleClass(class_id, Kind.DIESEL_REF, tank_gal, 1.0, 0.0, 1.0 / mpg, flow_gal_min)


def consumption_rate(vc: VehicleClass, gross_weight: float | None = None, segment_multiplier: float = 1.0) -> float:
    """Energy per mile at a gross weight (lb) on a segment with the given multiplier.

    Never drops below a tenth of the base consumption.
    """
    if gross_weight is None:
        gross_weight = vc.reference_weight
    if not (gross_weight > 0 and segment_multiplier > 0):
        raise NonPositiveInputs(
            f"gross_weight and segment_multiplier must be positive, got {gross_weight}, {segment_multiplier}"
        )
    c = vc.base_consumption
    rate = (c + vc.weight_sensitivity * (gross_weight - vc.reference_weight) / 1000.0) * segment_multiplier
    return max(rate, 0.1 * c)


def range_to_floor(vc: VehicleClass, onboard: float, rate: float) -> float:
    """Miles that ``onboard`` energy lasts at ``rate`` before hitting the reserve floor."""
    if not rate > 0:
        raise NonPositiveInputs(f"rate must be positive, got {rate}")
    return max(0.0, (onboard - vc.floor) / rate)


def replenish_time(vc: VehicleClass, amount: float) -> float:
    """Minutes needed to put ``amount`` into the store at the class replenishment rate."""
    if amount < -ENERGY_TOL or amount > vc.effective_full + ENERGY_TOL or math.isnan(amount):
        raise AmountExceedsCapacity(
            f"{vc.class_id}: amount {amount} outside [0, {vc.effective_full}] {vc.unit}"
        )
    return max(amount, 0.0) / vc.replenish_rate


@dataclass(frozen=True)
class EnergyState:
    onboard: float
    class_ref: str


def registry(classes) -> Mapping[str, VehicleClass]:
    """Freeze a collection of classes into a read-only id -> class mapping."""
    out: dict[str, VehicleClass] = {}
    for vc in classes:
        if vc.class_id in out:
            raise InvalidVehicleClass(f"duplicate vehicle class id {vc.class_id!r}")
        out[vc.class_id] = vc
    return MappingProxyType(out)


def load_vehicle_classes(path) -> Mapping[str, VehicleClass]:
    """Read a JSON object or list of objects in the vehicle-class schema."""
    data = json.loads(Path(path).read_text())
    if isinstance(data, dict):
        data = [data]
    return registry(VehicleClass.from_dict(d) for d in data)
