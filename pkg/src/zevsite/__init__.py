"""Corridor-scale siting of hydrogen and battery-electric truck refuelling stations.

Trips are simulated along milepost-referenced routes under a reserve-floor
refuelling policy; station subsets are chosen by genetic search (with an
exhaustive check for small instances) and then sized into dispensers or
chargers.
"""

__version__ = "0.1.0"

from .demand import AdoptionSpec, DepartureHistogram, ODPair, TripSpec, apply_adoption, distance_stats, sample_trips
from .geo import (
    CandidateSite,
    GeoPoint,
    RegionGrid,
    RouteProfile,
    build_route_profile,
    filter_candidates,
    haversine,
    raster_candidates,
    snap_site,
)
from .impact import EnergyPathway, co2_annual, pathway_ranking, refuel_rate
from .siting import (
    GaConfig,
    Scenario,
    SitingSolution,
    completion_curve,
    exhaustive_optimize,
    fitness,
    ga_optimize,
    rollout,
)
from .sizing import EquipmentClass, charge_stats, dispenser_count, size_network
from .tripsim import FleetLedger, TripResult, simulate_fleet, simulate_trip
from .vehicle import Kind, VehicleClass, bev, consumption_rate, fcev, range_to_floor, replenish_time

__all__ = [
    "AdoptionSpec",
    "DepartureHistogram",
    "ODPair",
    "TripSpec",
    "apply_adoption",
    "distance_stats",
    "sample_trips",
    "CandidateSite",
    "GeoPoint",
    "RegionGrid",
    "RouteProfile",
    "build_route_profile",
    "filter_candidates",
    "haversine",
    "raster_candidates",
    "snap_site",
    "EnergyPathway",
    "co2_annual",
    "pathway_ranking",
    "refuel_rate",
    "GaConfig",
    "Scenario",
    "SitingSolution",
    "completion_curve",
    "exhaustive_optimize",
    "fitness",
    "ga_optimize",
    "rollout",
    "EquipmentClass",
    "charge_stats",
    "dispenser_count",
    "size_network",
    "FleetLedger",
    "TripResult",
    "simulate_fleet",
    "simulate_trip",
    "Kind",
    "VehicleClass",
    "bev",
    "consumption_rate",
    "fcev",
    "range_to_floor",
    "replenish_time",
]
