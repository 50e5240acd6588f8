"""Single-trip energy simulation and fleet-level dispensing ledgers.

A truck leaves its origin with a full store and walks the decision points on
its route: every active station in travel order, then the destination. At a
station it refuels to full only when skipping would leave it below the
reserve floor before the next decision point. On a path where every stop
refills to full this greedy rule is optimal: it completes whenever any stop
subset does, and with the fewest stops (it is the classic farthest-reachable
argument; any feasible plan can be exchanged stop by stop for the greedy
one without losing reachability).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .demand import TripSpec
from .errors import SiteNotOnRoute, UnsortedStations, ZevsiteError
from .geo import CandidateSite, RouteProfile
from .vehicle import ENERGY_TOL, VehicleClass, consumption_rate, replenish_time

DEFAULT_SPEED_MPH = 50.0


class EnergyProfile:
    """Cumulative energy use along a route in the direction of travel.

    Consumption is constant on each segment, so cumulative energy is
    piecewise linear in distance and linear interpolation is exact.
    """

    def __init__(self, route: RouteProfile, vc: VehicleClass, direction: str = "forward",
                 gross_weight: float | None = None):
        mp = np.asarray(route.mileposts, dtype=float)
        rates = np.array([consumption_rate(vc, gross_weight, m) for m in route.segment_multiplier])
        self.length = route.length
        self.reverse = direction == "reverse"
        if self.reverse:
            mp = route.length - mp[::-1]
            rates = rates[::-1]
        self.x = mp
        self.cum = np.concatenate([[0.0], np.cumsum(rates * np.diff(mp))])

    def at(self, pos):
        return np.interp(pos, self.x, self.cum)

    def position_at(self, energy):
        return np.interp(energy, self.cum, self.x)

    def travel_pos(self, milepost):
        """Distance travelled when passing a route milepost."""
        return self.length - milepost if self.reverse else milepost

    def route_milepost(self, pos):
        return self.length - pos if self.reverse else pos

    @property
    def total(self) -> float:
        return float(self.cum[-1])


@dataclass(frozen=True)
class StopEvent:
    site_id: str
    milepost: float
    arrival_time: float
    arrival_onboard: float
    dispensed: float
    dwell: float


@dataclass(frozen=True)
class TripResult:
    """Outcome of one simulated trip.

    Mileposts (stops and ``stranded_milepost``) are in the route's own
    forward frame. ``trace`` holds ``(distance_travelled, onboard)``
    breakpoints of the piecewise-linear energy trace, including the
    before/after pair at every refuel.
    """

    trip_id: str
    route_id: str
    vehicle_class_id: str
    direction: str
    completed: bool
    stranded_milepost: float | None
    stops: tuple[StopEvent, ...]
    destination_dispensed: float
    consumed: float
    arrival_onboard: float
    arrival_time: float
    distance: float
    destination_id: str
    trace: tuple[tuple[float, float], ...] = field(repr=False, default=())

    @property
    def inroute_dispensed(self) -> float:
        return math.fsum(s.dispensed for s in self.stops)


def destination_id(route_id: str, direction: str) -> str:
    return f"{route_id}:{'end' if direction == 'forward' else 'start'}"


def simulate_trip(
    trip: TripSpec,
    route: RouteProfile,
    vc: VehicleClass,
    active_sites: Sequence[tuple[float, str]] = (),
    speed_mph: float = DEFAULT_SPEED_MPH,
    profile: EnergyProfile | None = None,
) -> TripResult:
    """Simulate one trip under the refuel-only-when-needed policy.

    ``active_sites`` are ``(milepost, site_id)`` pairs on this route in the
    forward frame, sorted by milepost; reverse trips visit them mirrored.
    """
    if not speed_mph > 0:
        raise ZevsiteError(f"speed must be positive, got {speed_mph}")
    L = route.length
    prev = -math.inf
    for m, sid in active_sites:
        if m < prev:
            raise UnsortedStations(f"route {route.route_id!r}: site {sid!r} at {m} follows milepost {prev}")
        if not -ENERGY_TOL <= m <= L + ENERGY_TOL:
            raise SiteNotOnRoute(f"site {sid!r} milepost {m} outside route {route.route_id!r} [0, {L}]")
        prev = m
    if profile is None:
        profile = EnergyProfile(route, vc, trip.direction, trip.gross_weight_lb)

    ordered = active_sites[::-1] if profile.reverse else active_sites
    stations = [(min(max(profile.travel_pos(m), 0.0), L), sid, m) for m, sid in ordered]
    min_per_mile = 60.0 / speed_mph
    full, floor = vc.effective_full, vc.floor

    E, pos, e_pos = full, 0.0, 0.0
    consumed, dwell_total = 0.0, 0.0
    stops: list[StopEvent] = []
    trace = [(0.0, full)]

    def drive_to(p, e_p):
        for xv, cv in zip(profile.x, profile.cum):
            if pos < xv < p:
                trace.append((float(xv), E - (cv - e_pos)))
        trace.append((p, E - (e_p - e_pos)))

    def stranded():
        reach = E - floor
        x = float(profile.position_at(e_pos + reach))
        drive_to(x, e_pos + reach)
        trace[-1] = (x, floor)
        return TripResult(
            trip.trip_id, trip.route_id, vc.class_id, trip.direction, False,
            float(profile.route_milepost(x)), tuple(stops), 0.0, consumed + reach, floor,
            trip.depart + x * min_per_mile + dwell_total, x,
            destination_id(trip.route_id, trip.direction), tuple(trace),
        )

    e_next_all = [float(profile.at(p)) for p, _, _ in stations] + [profile.total]
    for j, (p, sid, m) in enumerate(stations):
        e_p = e_next_all[j]
        need = e_p - e_pos
        if E - need < floor - ENERGY_TOL:
            return stranded()
        drive_to(p, e_p)
        E -= need
        consumed += need
        pos, e_pos = p, e_p
        need_next = e_next_all[j + 1] - e_p
        if E - need_next < floor - ENERGY_TOL and E < full - ENERGY_TOL:
            dispensed = full - E
            dwell = replenish_time(vc, dispensed)
            stops.append(StopEvent(sid, m, trip.depart + p * min_per_mile + dwell_total, E, dispensed, dwell))
            dwell_total += dwell
            E = full
            trace.append((p, full))

    need = profile.total - e_pos
    if E - need < floor - ENERGY_TOL:
        return stranded()
    drive_to(L, profile.total)
    E -= need
    consumed += need
    return TripResult(
        trip.trip_id, trip.route_id, vc.class_id, trip.direction, True, None, tuple(stops),
        full - E, consumed, E, trip.depart + L * min_per_mile + dwell_total, L,
        destination_id(trip.route_id, trip.direction), tuple(trace),
    )


@dataclass(frozen=True)
class LedgerEvent:
    site_id: str
    trip_id: str
    vehicle_class_id: str
    unit: str
    time: float
    dispensed: float
    dwell: float


@dataclass(frozen=True)
class FleetLedger:
    """Dispensed energy per in-route site and per destination for a trip population."""

    inroute: Mapping[str, tuple[LedgerEvent, ...]]
    destination: Mapping[str, tuple[LedgerEvent, ...]]
    stranded: tuple[str, ...]
    trip_count: int
    results: tuple[TripResult, ...] = field(default=(), repr=False, compare=False)

    @property
    def completion_rate(self) -> float:
        if self.trip_count == 0:
            return 1.0
        return (self.trip_count - len(self.stranded)) / self.trip_count

    @property
    def inroute_totals(self) -> dict[str, float]:
        return {k: math.fsum(e.dispensed for e in v) for k, v in self.inroute.items()}

    @property
    def destination_totals(self) -> dict[str, float]:
        return {k: math.fsum(e.dispensed for e in v) for k, v in self.destination.items()}

    def rows(self) -> list[dict]:
        """Rows of the ledger CSV, in-route sites first, each group sorted by id."""
        out = []
        for role, book in (("inroute", self.inroute), ("destination", self.destination)):
            for sid in sorted(book):
                events = book[sid]
                units = sorted({e.unit for e in events})
                out.append({
                    "site_id": sid, "role": role,
                    "total_dispensed": math.fsum(e.dispensed for e in events),
                    "unit": "+".join(units), "event_count": len(events),
                })
        return out

    def to_dict(self) -> dict:
        def book(b):
            return {sid: [[e.trip_id, e.vehicle_class_id, e.unit, e.time, e.dispensed, e.dwell] for e in ev]
                    for sid, ev in sorted(b.items())}
        return {"trip_count": self.trip_count, "stranded": list(self.stranded),
                "inroute": book(self.inroute), "destination": book(self.destination)}

    @classmethod
    def from_dict(cls, d: Mapping) -> "FleetLedger":
        def book(b):
            return {sid: tuple(LedgerEvent(sid, *row) for row in ev) for sid, ev in b.items()}
        return cls(book(d["inroute"]), book(d["destination"]), tuple(d["stranded"]), int(d["trip_count"]))


def active_sites_by_route(
    candidates: Sequence[CandidateSite], mask: Sequence[bool], route_ids=None
) -> dict[str, list[tuple[float, str]]]:
    """Sorted ``(milepost, site_id)`` lists of active candidates for every route they snap to."""
    if len(mask) != len(candidates):
        raise ZevsiteError(f"mask length {len(mask)} != candidate count {len(candidates)}")
    out: dict[str, list[tuple[float, str]]] = {rid: [] for rid in (route_ids or ())}
    for site, on in zip(candidates, mask):
        if on:
            for rid, (mp, _) in site.snaps.items():
                out.setdefault(rid, []).append((mp, site.site_id))
    for v in out.values():
        v.sort()
    return out


def simulate_fleet(
    trips: Sequence[TripSpec],
    routes: Mapping[str, RouteProfile],
    classes: Mapping[str, VehicleClass],
    mask: Sequence[bool],
    candidates: Sequence[CandidateSite],
    speed_mph: float = DEFAULT_SPEED_MPH,
    workers: int = 1,
) -> FleetLedger:
    """Simulate every trip under the active stations in ``mask`` and build the ledger."""
    active = active_sites_by_route(candidates, mask, routes)
    profiles: dict[tuple, EnergyProfile] = {}
    for t in trips:
        key = (t.route_id, t.vehicle_class_id, t.direction, t.gross_weight_lb)
        if key not in profiles:
            profiles[key] = EnergyProfile(routes[t.route_id], classes[t.vehicle_class_id], t.direction,
                                          t.gross_weight_lb)

    def run(t: TripSpec) -> TripResult:
        try:
            return simulate_trip(t, routes[t.route_id], classes[t.vehicle_class_id], active.get(t.route_id, ()),
                                 speed_mph, profiles[(t.route_id, t.vehicle_class_id, t.direction, t.gross_weight_lb)])
        except ZevsiteError as e:
            raise type(e)(f"trip {t.trip_id!r}: {e}") from e

    if workers > 1 and len(trips) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, trips))
    else:
        results = [run(t) for t in trips]
    results.sort(key=lambda r: r.trip_id)
    return build_ledger(results, classes)


def build_ledger(results: Sequence[TripResult], classes: Mapping[str, VehicleClass]) -> FleetLedger:
    inroute: dict[str, list[LedgerEvent]] = {}
    dest: dict[str, list[LedgerEvent]] = {}
    stranded = []
    for r in results:
        vc = classes[r.vehicle_class_id]
        for s in r.stops:
            inroute.setdefault(s.site_id, []).append(
                LedgerEvent(s.site_id, r.trip_id, vc.class_id, vc.unit, s.arrival_time, s.dispensed, s.dwell))
        if r.completed:
            dest.setdefault(r.destination_id, []).append(
                LedgerEvent(r.destination_id, r.trip_id, vc.class_id, vc.unit, r.arrival_time,
                            r.destination_dispensed, replenish_time(vc, r.destination_dispensed)))
        else:
            stranded.append(r.trip_id)
    return FleetLedger(
        {k: tuple(inroute[k]) for k in sorted(inroute)},
        {k: tuple(dest[k]) for k in sorted(dest)},
        tuple(stranded), len(results), tuple(results),
    )
