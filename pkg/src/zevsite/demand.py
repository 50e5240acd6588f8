"""Trip populations: loading, synthetic OD sampling, adoption draws and distance reports."""

from __future__ import annotations

import csv
import json
import math
import zlib
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .errors import EmptyWeightSet, ParseError, UnknownRoute, UnknownVehicleClass, ZevsiteError
from .geo import GeoPoint, RouteProfile

TRIP_COLUMNS = ("trip_id", "route_id", "direction", "depart_utc_min", "vehicle_class_id")
OD_COLUMNS = ("origin_zone", "dest_zone", "route_id", "weight")
DIRECTIONS = ("forward", "reverse")
DISTANCE_BIN_MI = 50.0


@dataclass(frozen=True)
class Zone:
    zone_id: str
    centroid: GeoPoint
    weight: float = 1.0


@dataclass(frozen=True)
class TripSpec:
    """One truck mission. ``depart`` is minutes since the scenario epoch, UTC."""

    trip_id: str
    route_id: str
    direction: str
    depart: float
    vehicle_class_id: str
    gross_weight_lb: float | None = None

    def __post_init__(self):
        if self.direction not in DIRECTIONS:
            raise ZevsiteError(f"trip {self.trip_id!r}: direction must be forward|reverse, got {self.direction!r}")
        if not self.depart >= 0:
            raise ZevsiteError(f"trip {self.trip_id!r}: depart must be >= 0, got {self.depart}")


@dataclass(frozen=True)
class ODPair:
    origin_zone: str
    dest_zone: str
    route_id: str
    weight: float
    direction: str = "forward"


class DepartureHistogram:
    """Probability of departing in each of the 24 UTC hours."""

    def __init__(self, bins: Sequence[float]):
        bins = np.asarray(bins, dtype=float)
        if bins.shape != (24,):
            raise ZevsiteError(f"departure histogram needs 24 bins, got {bins.size}")
        if np.any(bins < 0) or not np.all(np.isfinite(bins)):
            raise ZevsiteError("departure histogram bins must be finite and non-negative")
        if abs(bins.sum() - 1.0) > 1e-9:
            raise ZevsiteError(f"departure histogram must sum to 1, sums to {bins.sum()!r}")
        self.bins = bins
        self.bins.setflags(write=False)

    @classmethod
    def default(cls) -> "DepartureHistogram":
        """Uniform over 06:00-18:00."""
        bins = np.zeros(24)
        bins[6:18] = 1 / 12
        return cls(bins)

    @classmethod
    def point_mass(cls, hour: int) -> "DepartureHistogram":
        bins = np.zeros(24)
        bins[hour] = 1.0
        return cls(bins)

    @classmethod
    def load(cls, path) -> "DepartureHistogram":
        return cls(json.loads(Path(path).read_text()))


@dataclass(frozen=True)
class AdoptionSpec:
    fraction: float
    mode: str = "deterministic"
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.fraction <= 1.0:
            raise ZevsiteError(f"adoption fraction must be in [0, 1], got {self.fraction}")
        if self.mode not in ("deterministic", "bernoulli"):
            raise ZevsiteError(f"adoption mode must be deterministic|bernoulli, got {self.mode!r}")


def stream(seed: int, label: str) -> np.random.Generator:
    """Independent generator for one (seed, call-site) pair."""
    return np.random.default_rng([int(seed), zlib.crc32(label.encode())])


def load_trips(
    path,
    routes: Mapping[str, RouteProfile] | None = None,
    classes: Mapping | None = None,
) -> list[TripSpec]:
    """Read a trips CSV; validate route and class references when lookups are given.

    An optional ``gross_weight_lb`` column feeds the weight-sensitive consumption hook.
    """
    with open(path, newline="") as f:
        reader = csv.DictReader(f)
        missing = [c for c in TRIP_COLUMNS if c not in (reader.fieldnames or ())]
        if missing:
            raise ParseError(f"missing columns {missing}", row=1)
        trips = []
        for row_no, row in enumerate(reader, start=2):
            try:
                depart = float(row["depart_utc_min"])
            except (TypeError, ValueError):
                raise ParseError(f"bad number {row['depart_utc_min']!r}", row_no, "depart_utc_min") from None
            weight = (row.get("gross_weight_lb") or "").strip()
            try:
                weight = float(weight) if weight else None
            except ValueError:
                raise ParseError(f"bad number {weight!r}", row_no, "gross_weight_lb") from None
            if routes is not None and row["route_id"] not in routes:
                raise UnknownRoute(f"unknown route_id {row['route_id']!r}", row_no, "route_id")
            if classes is not None and row["vehicle_class_id"] not in classes:
                raise UnknownVehicleClass(
                    f"unknown vehicle_class_id {row['vehicle_class_id']!r}", row_no, "vehicle_class_id"
                )
            try:
                trips.append(TripSpec(row["trip_id"], row["route_id"], row["direction"].strip(),
                                      depart, row["vehicle_class_id"], weight))
            except ZevsiteError as e:
                raise ParseError(str(e), row_no) from None
    return trips


def load_od_pairs(path) -> list[ODPair]:
    with open(path, newline="") as f:
        reader = csv.DictReader(f)
        missing = [c for c in OD_COLUMNS if c not in (reader.fieldnames or ())]
        if missing:
            raise ParseError(f"missing columns {missing}", row=1)
        pairs = []
        for row_no, row in enumerate(reader, start=2):
            try:
                w = float(row["weight"])
            except ValueError:
                raise ParseError(f"bad number {row['weight']!r}", row_no, "weight") from None
            pairs.append(ODPair(row["origin_zone"], row["dest_zone"], row["route_id"], w,
                                (row.get("direction") or "forward").strip()))
    return pairs


def sample_trips(
    od_pairs: Sequence[ODPair],
    n: int,
    hist: DepartureHistogram,
    day_count: int,
    seed: int,
    vehicle_class_id: str,
) -> list[TripSpec]:
    """Draw ``n`` trips: OD pair by weight, hour from ``hist``, minute and day uniform."""
    if n < 0:
        raise ZevsiteError(f"n must be >= 0, got {n}")
    if n == 0:
        return []
    w = np.array([p.weight for p in od_pairs], dtype=float)
    if w.size == 0 or np.any(w < 0) or not w.sum() > 0:
        raise EmptyWeightSet("OD weights must be non-negative with a positive sum")
    if day_count < 1:
        raise ZevsiteError(f"day_count must be >= 1, got {day_count}")
    rng = stream(seed, "sample_trips")
    pair_idx = rng.choice(w.size, size=n, p=w / w.sum())
    hours = rng.choice(24, size=n, p=hist.bins)
    minutes = rng.integers(0, 60, size=n)
    days = rng.integers(0, day_count, size=n)
    width = max(6, len(str(n)))
    trips = []
    for i in range(n):
        pair = od_pairs[pair_idx[i]]
        depart = float(days[i] * 1440 + hours[i] * 60 + minutes[i])
        trips.append(TripSpec(f"T{i:0{width}d}", pair.route_id, pair.direction, depart, vehicle_class_id))
    return trips


def apply_adoption(trips: Sequence[TripSpec], spec: AdoptionSpec) -> list[TripSpec]:
    """Subset of trips converted to the zero-emission powertrain, in original order."""
    n = len(trips)
    rng = stream(spec.seed, "apply_adoption")
    if spec.mode == "deterministic":
        # floor, never round up past the fraction; epsilon absorbs 0.29 * 100 = 28.999...
        k = math.floor(spec.fraction * n + 1e-9)
        keep = np.sort(rng.permutation(n)[:k])
    else:
        keep = np.flatnonzero(rng.random(n) < spec.fraction)
    return [trips[i] for i in keep]


@dataclass(frozen=True)
class DistanceStats:
    count: int
    min: float | None = None
    max: float | None = None
    mean: float | None = None
    p50: float | None = None
    p90: float | None = None
    histogram: tuple[tuple[float, float, int], ...] = ()


def nearest_rank(sorted_values: Sequence[float], p: float) -> float:
    rank = max(1, math.ceil(p * len(sorted_values) - 1e-12))
    return sorted_values[rank - 1]


def distance_stats(trips: Sequence[TripSpec], routes: Mapping[str, RouteProfile]) -> DistanceStats:
    """Route-length statistics over a trip list, with 50-mile histogram bins."""
    if not trips:
        return DistanceStats(0)
    lengths = sorted(routes[t.route_id].length for t in trips)
    nbins = int(lengths[-1] // DISTANCE_BIN_MI) + 1
    counts = np.bincount([int(x // DISTANCE_BIN_MI) for x in lengths], minlength=nbins)
    hist = tuple((i * DISTANCE_BIN_MI, (i + 1) * DISTANCE_BIN_MI, int(c)) for i, c in enumerate(counts))
    return DistanceStats(
        count=len(lengths),
        min=lengths[0],
        max=lengths[-1],
        mean=float(np.mean(lengths)),
        p50=nearest_rank(lengths, 0.5),
        p90=nearest_rank(lengths, 0.9),
        histogram=hist,
    )
