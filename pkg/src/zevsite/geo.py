"""Milepost-referenced route polylines, site snapping and candidate generation.

Distances are great-circle miles on a sphere of radius ``EARTH_RADIUS_MI``.
Projection of a point onto a segment is done in a local equirectangular
frame anchored at the segment, which is accurate to well under 0.1% for the
short segments that make up highway corridors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import DuplicateVertex, TooFewVertices, ZevsiteError

EARTH_RADIUS_MI = 3958.7613
DEFAULT_RADIUS_MI = 5.0

_DEG = math.pi / 180.0
_SNAP_TIE_MI = 1e-12


@dataclass(frozen=True)
class GeoPoint:
    lat: float
    lon: float

    def __post_init__(self):
        if not (math.isfinite(self.lat) and math.isfinite(self.lon)):
            raise ZevsiteError(f"non-finite coordinate ({self.lat}, {self.lon})")
        if not -90.0 <= self.lat <= 90.0:
            raise ZevsiteError(f"latitude {self.lat} outside [-90, 90]")
        if not -180.0 <= self.lon <= 180.0:
            raise ZevsiteError(f"longitude {self.lon} outside [-180, 180]")


def haversine(a: GeoPoint, b: GeoPoint) -> float:
    """Great-circle distance between two points in miles."""
    return float(_haversine_arr(a.lat, a.lon, b.lat, b.lon))


def _haversine_arr(lat1, lon1, lat2, lon2):
    lat1, lon1, lat2, lon2 = (np.asarray(v, dtype=float) * _DEG for v in (lat1, lon1, lat2, lon2))
    h = np.sin((lat2 - lat1) / 2) ** 2 + np.cos(lat1) * np.cos(lat2) * np.sin((lon2 - lon1) / 2) ** 2
    return 2 * EARTH_RADIUS_MI * np.arcsin(np.sqrt(np.clip(h, 0.0, 1.0)))


@dataclass(frozen=True)
class RouteProfile:
    """A route polyline with cumulative mileposts.

    ``segment_multiplier[i]`` scales energy consumption on the segment from
    vertex ``i`` to ``i + 1`` (grade, wind, or any other per-segment effect).
    """

    route_id: str
    vertices: tuple[GeoPoint, ...]
    mileposts: tuple[float, ...]
    segment_multiplier: tuple[float, ...]

    @property
    def length(self) -> float:
        return self.mileposts[-1]

    @property
    def lats(self) -> np.ndarray:
        return np.array([v.lat for v in self.vertices])

    @property
    def lons(self) -> np.ndarray:
        return np.array([v.lon for v in self.vertices])

    def point_at(self, milepost: float) -> GeoPoint:
        """Linearly interpolated location at a milepost (clamped to the route)."""
        m = min(max(milepost, 0.0), self.length)
        mp = np.asarray(self.mileposts)
        return GeoPoint(float(np.interp(m, mp, self.lats)), float(np.interp(m, mp, self.lons)))


def build_route_profile(
    route_id: str,
    vertices: Sequence[GeoPoint],
    multipliers: Sequence[float] | None = None,
) -> RouteProfile:
    vertices = tuple(vertices)
    if len(vertices) < 2:
        raise TooFewVertices(f"route {route_id!r} needs at least 2 vertices, got {len(vertices)}")
    lats = np.array([v.lat for v in vertices])
    lons = np.array([v.lon for v in vertices])
    seg = _haversine_arr(lats[:-1], lons[:-1], lats[1:], lons[1:])
    mileposts = np.concatenate([[0.0], np.cumsum(seg)])
    # a segment too short to move the cumulative milepost counts as coincident
    flat = np.flatnonzero(np.diff(mileposts) <= 0.0)
    if flat.size:
        i = int(flat[0])
        raise DuplicateVertex(f"route {route_id!r}: vertices {i} and {i + 1} coincide")
    if multipliers is None:
        multipliers = (1.0,) * (len(vertices) - 1)
    multipliers = tuple(float(m) for m in multipliers)
    if len(multipliers) != len(vertices) - 1:
        raise ZevsiteError(
            f"route {route_id!r}: expected {len(vertices) - 1} segment multipliers, got {len(multipliers)}"
        )
    if any(not (m > 0 and math.isfinite(m)) for m in multipliers):
        raise ZevsiteError(f"route {route_id!r}: segment multipliers must be positive")
    return RouteProfile(route_id, vertices, tuple(float(m) for m in mileposts), multipliers)


def snap_site(site: GeoPoint, route: RouteProfile) -> tuple[float, float]:
    """Project ``site`` onto ``route``; return ``(milepost, snap_distance)``.

    Among equally near points the one with the smaller milepost wins.
    """
    lats, lons = route.lats, route.lons
    lat0, lon0 = lats[:-1], lons[:-1]
    lat1, lon1 = lats[1:], lons[1:]
    # local frame per segment: origin at the start vertex, x east, y north (miles)
    kx = EARTH_RADIUS_MI * _DEG * np.cos((lat0 + lat1) / 2 * _DEG)
    ky = EARTH_RADIUS_MI * _DEG
    bx, by = (lon1 - lon0) * kx, (lat1 - lat0) * ky
    px, py = (site.lon - lon0) * kx, (site.lat - lat0) * ky
    t = np.clip((px * bx + py * by) / (bx * bx + by * by), 0.0, 1.0)

    mp = np.asarray(route.mileposts)
    seg_len = np.diff(mp)
    cand_mp = mp[:-1] + t * seg_len
    cand_mp[t >= 1.0] = mp[1:][t >= 1.0]
    dist = _haversine_arr(site.lat, site.lon, lat0 + t * (lat1 - lat0), lon0 + t * (lon1 - lon0))

    near = dist <= dist.min() + _SNAP_TIE_MI
    i = int(np.flatnonzero(near)[np.argmin(cand_mp[near])])
    return float(cand_mp[i]), float(dist[i])


@dataclass(frozen=True)
class CandidateSite:
    """A site eligible to host a station.

    ``snaps`` maps route_id to ``(milepost, snap_distance)``; it is empty for
    raw inputs that have not been through :func:`filter_candidates`.
    """

    site_id: str
    location: GeoPoint
    snaps: Mapping[str, tuple[float, float]] = field(default_factory=dict)


def filter_candidates(
    sites: Sequence[CandidateSite],
    routes: Sequence[RouteProfile] | Mapping[str, RouteProfile],
    d: float = DEFAULT_RADIUS_MI,
) -> list[CandidateSite]:
    """Keep sites within ``d`` miles of at least one route, snapping each to every such route."""
    if not d > 0:
        raise ZevsiteError(f"candidate radius must be positive, got {d}")
    if isinstance(routes, Mapping):
        routes = list(routes.values())
    kept = []
    for site in sites:
        snaps = {}
        for route in routes:
            mp, dist = snap_site(site.location, route)
            if dist <= d:
                snaps[route.route_id] = (mp, dist)
        if snaps:
            kept.append(CandidateSite(site.site_id, site.location, snaps))
    return kept


@dataclass(frozen=True)
class RegionGrid:
    lat_min: float
    lat_max: float
    lon_min: float
    lon_max: float
    d_lat: float
    d_lon: float

    def __post_init__(self):
        if not (self.lat_min < self.lat_max and self.lon_min < self.lon_max):
            raise ZevsiteError("region bounds must satisfy min < max")
        if not (self.d_lat > 0 and self.d_lon > 0):
            raise ZevsiteError("grid steps must be positive")

    @property
    def shape(self) -> tuple[int, int]:
        # the 1e-9 guards against spans like 1.1/0.1 evaluating to 11.000000000000002
        rows = math.ceil((self.lat_max - self.lat_min) / self.d_lat - 1e-9)
        cols = math.ceil((self.lon_max - self.lon_min) / self.d_lon - 1e-9)
        return rows, cols


def raster_candidates(grid: RegionGrid) -> list[CandidateSite]:
    """One candidate per grid cell, at the centroid of the cell clipped to the region."""
    rows, cols = grid.shape
    sites = []
    for r in range(rows):
        lo = grid.lat_min + r * grid.d_lat
        lat = (lo + min(lo + grid.d_lat, grid.lat_max)) / 2
        for c in range(cols):
            left = grid.lon_min + c * grid.d_lon
            lon = (left + min(left + grid.d_lon, grid.lon_max)) / 2
            sites.append(CandidateSite(f"r{r}c{c}", GeoPoint(lat, lon)))
    return sites
