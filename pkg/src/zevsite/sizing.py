"""Dispenser and charger counts at a utilization target, plus charging-power statistics.

Utilization of one dispenser is its busy time divided by the horizon. A site
needs the fewest units whose mean utilization stays at or under the target.
Queueing is not modelled; the utilization cap stands in for availability.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

from .errors import NonPositiveHorizon, ZevsiteError
from .tripsim import FleetLedger, LedgerEvent
from .vehicle import Kind, VehicleClass

DAY_MIN = 1440.0
WINDOW_STEP_MIN = 15.0
C_RATE_LIMIT = 1.5

# catalogue of the technology ranges discussed for heavy-duty corridors
H2_DISPENSER_KG_MIN = (1.8, 3.6, 5.0, 7.2, 10.0)
EV_CHARGER_KW = (150.0, 350.0, 750.0, 1000.0, 1250.0)


@dataclass(frozen=True)
class EquipmentClass:
    name: str
    kind: str  # "h2_dispenser" (rate kg/min) or "ev_charger" (rate kW)
    rate: float

    def __post_init__(self):
        if self.kind not in ("h2_dispenser", "ev_charger"):
            raise ZevsiteError(f"equipment kind must be h2_dispenser|ev_charger, got {self.kind!r}")
        if not self.rate > 0:
            raise ZevsiteError(f"equipment rate must be positive, got {self.rate}")

    @property
    def unit(self) -> str:
        return "kg/min" if self.kind == "h2_dispenser" else "kW"

    @property
    def units_per_min(self) -> float:
        """Delivery rate in store units per minute (kg/min, or kWh/min for chargers)."""
        return self.rate if self.kind == "h2_dispenser" else self.rate / 60.0


def _check(U, horizon_min):
    if not horizon_min > 0:
        raise NonPositiveHorizon(f"horizon must be positive, got {horizon_min}")
    if not 0 < U <= 1:
        raise ZevsiteError(f"utilization target must be in (0, 1], got {U}")


def _count(busy: float, U: float, horizon_min: float) -> int:
    if busy <= 0:
        return 0
    return max(1, math.ceil(busy / (U * horizon_min) - 1e-12))


def dispenser_count(site_dispensed: float, eq: EquipmentClass, U: float, horizon_min: float) -> int:
    _check(U, horizon_min)
    return _count(site_dispensed / eq.units_per_min, U, horizon_min)


@dataclass(frozen=True)
class SiteSizing:
    site_id: str
    dispensed: float
    busy_minutes: float
    horizon_minutes: float
    utilization_target: float
    required_count: int
    busiest_day_count: int

    @property
    def utilization(self) -> float:
        return self.busy_minutes / (self.required_count * self.horizon_minutes) if self.required_count else 0.0


@dataclass(frozen=True)
class SizingReport:
    equipment: EquipmentClass
    sites: tuple[SiteSizing, ...]

    @property
    def total_units(self) -> int:
        return sum(s.required_count for s in self.sites)

    def rows(self) -> list[dict]:
        return [{
            "site_id": s.site_id, "equipment": self.equipment.name, "rate": self.equipment.rate,
            "unit": self.equipment.unit, "busy_min": s.busy_minutes, "horizon_min": s.horizon_minutes,
            "utilization_target": s.utilization_target, "required_count": s.required_count,
            "busiest_day_count": s.busiest_day_count,
        } for s in self.sites]


def busiest_window_busy(events: Sequence[LedgerEvent], per_min: float,
                        window: float = DAY_MIN, step: float = WINDOW_STEP_MIN) -> float:
    """Largest busy time falling inside any ``window``-minute span, sliding in ``step`` minutes."""
    spans = [(e.time, e.time + e.dispensed / per_min) for e in events if e.dispensed > 0]
    if not spans:
        return 0.0
    t0 = math.floor(min(s for s, _ in spans) / step) * step
    t_end = max(e for _, e in spans)
    best = 0.0
    start = t0
    while True:
        stop = start + window
        busy = sum(max(0.0, min(e, stop) - max(s, start)) for s, e in spans)
        best = max(best, busy)
        if stop >= t_end:
            break
        start += step
    return best


def size_network(ledger: FleetLedger, eq: EquipmentClass, U: float, horizon_min: float) -> SizingReport:
    """Units per in-route site over the horizon, and for the busiest single day.

    The busiest-day count is never below the horizon-average count.
    """
    _check(U, horizon_min)
    per_min = eq.units_per_min
    sites = []
    for sid in sorted(ledger.inroute):
        events = ledger.inroute[sid]
        total = math.fsum(e.dispensed for e in events)
        if total <= 0:
            continue
        busy = total / per_min
        count = _count(busy, U, horizon_min)
        day = _count(busiest_window_busy(events, per_min), U, DAY_MIN)
        sites.append(SiteSizing(sid, total, busy, horizon_min, U, count, max(count, day)))
    return SizingReport(eq, tuple(sites))


@dataclass(frozen=True)
class ChargeEventStat:
    site_id: str
    event_time: float
    power_kw: float
    nameplate_kwh: float
    c_rate: float
    flagged: bool


def c_rate_stat(site_id: str, time: float, power_kw: float, nameplate_kwh: float) -> ChargeEventStat:
    c = power_kw / nameplate_kwh
    return ChargeEventStat(site_id, time, power_kw, nameplate_kwh, c, c > C_RATE_LIMIT)


def peak_concurrent_power(intervals: Sequence[tuple[float, float, float]]) -> float:
    """Peak of summed power over half-open ``[start, end)`` intervals of ``(start, end, kW)``."""
    edges = []
    for s, e, p in intervals:
        if e > s:
            edges.append((s, 1, p))
            edges.append((e, 0, -p))  # ends sort before starts at the same instant
    edges.sort(key=lambda x: (x[0], x[1]))
    level = peak = 0.0
    for _, _, dp in edges:
        level += dp
        peak = max(peak, level)
    return peak


def charge_stats(ledger: FleetLedger, classes: Mapping[str, VehicleClass]):
    """Per-event C-rate flags and per-site peak concurrent charging power (kW).

    Only battery-electric events are considered.
    """
    stats = []
    intervals: dict[str, list] = {}
    for sid in sorted(ledger.inroute):
        for e in ledger.inroute[sid]:
            vc = classes[e.vehicle_class_id]
            if vc.kind is not Kind.BEV:
                continue
            stats.append(c_rate_stat(sid, e.time, vc.charger_kw, vc.capacity))
            intervals.setdefault(sid, []).append((e.time, e.time + e.dwell, vc.charger_kw))
    peaks = {sid: peak_concurrent_power(iv) for sid, iv in intervals.items()}
    return stats, peaks
