import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zevsite.errors import DuplicateVertex, TooFewVertices
from zevsite.geo import (
    EARTH_RADIUS_MI,
    GeoPoint,
    RegionGrid,
    build_route_profile,
    filter_candidates,
    haversine,
    raster_candidates,
    snap_site,
)

from conftest import DEG_PER_MI, MI_PER_DEG, equator_route, site_on_equator

points = st.builds(GeoPoint, st.floats(-89, 89), st.floats(-179, 179))


def test_haversine_examples():
    assert haversine(GeoPoint(0, 0), GeoPoint(0, 1)) == pytest.approx(EARTH_RADIUS_MI * math.pi / 180, abs=1e-9)
    assert haversine(GeoPoint(0, 0), GeoPoint(0, 1)) == pytest.approx(69.093, abs=0.01)
    assert haversine(GeoPoint(90, 0), GeoPoint(-90, 0)) == pytest.approx(math.pi * EARTH_RADIUS_MI, abs=1e-6)
    assert haversine(GeoPoint(90, 0), GeoPoint(-90, 0)) == pytest.approx(12436.8, abs=0.5)


@given(points, points)
def test_haversine_symmetric_nonnegative(a, b):
    assert haversine(a, a) == 0
    assert haversine(a, b) == pytest.approx(haversine(b, a), abs=1e-9)
    assert haversine(a, b) >= 0


def test_geopoint_rejects_out_of_range():
    with pytest.raises(ValueError):
        GeoPoint(91, 0)
    with pytest.raises(ValueError):
        GeoPoint(0, float("nan"))


def test_route_profile_mileposts():
    r = build_route_profile("a", [GeoPoint(0, 0), GeoPoint(0, 1)])
    assert r.mileposts == pytest.approx((0, 69.093), abs=1e-3)
    r = build_route_profile("b", [GeoPoint(0, 0), GeoPoint(0, 1), GeoPoint(0, 2)])
    assert r.mileposts == pytest.approx((0, MI_PER_DEG, 2 * MI_PER_DEG), rel=1e-12)
    assert r.segment_multiplier == (1.0, 1.0)


def test_route_profile_errors():
    with pytest.raises(TooFewVertices):
        build_route_profile("a", [GeoPoint(0, 0)])
    with pytest.raises(DuplicateVertex):
        build_route_profile("a", [GeoPoint(0, 0), GeoPoint(0, 0), GeoPoint(0, 1)])
    with pytest.raises(ValueError):
        build_route_profile("a", [GeoPoint(0, 0), GeoPoint(0, 1)], [0.0])


@settings(max_examples=50)
@given(st.lists(points, min_size=2, max_size=8, unique=True))
def test_mileposts_strictly_increase_and_match_haversine(verts):
    try:
        r = build_route_profile("x", verts)
    except DuplicateVertex:
        return
    mp = np.array(r.mileposts)
    assert mp[0] == 0 and np.all(np.diff(mp) > 0)
    for i in range(len(verts) - 1):
        assert mp[i + 1] - mp[i] == pytest.approx(haversine(verts[i], verts[i + 1]), rel=1e-6)


def test_snap_at_vertex():
    r = equator_route("a", 300, cuts=(120,))
    mp, d = snap_site(r.vertices[1], r)
    assert mp == pytest.approx(r.mileposts[1], abs=1e-9)
    assert d == pytest.approx(0, abs=1e-9)


def test_snap_perpendicular_midpoint():
    r = build_route_profile("a", [GeoPoint(0, 0), GeoPoint(0, 1)])
    mp, d = snap_site(GeoPoint(3 * DEG_PER_MI, 0.5), r)
    # planar oracle: foot of the perpendicular is the midpoint, offset is 3 mi
    assert mp == pytest.approx(69.093 / 2, abs=0.05)
    assert d == pytest.approx(3.0, abs=0.05)


def test_snap_beyond_end_clamps():
    r = build_route_profile("a", [GeoPoint(0, 0), GeoPoint(0, 1)])
    site = GeoPoint(0.01, 1.2)
    mp, d = snap_site(site, r)
    assert mp == r.length
    assert d == pytest.approx(haversine(site, r.vertices[-1]), abs=1e-9)


def test_snap_tie_goes_to_smaller_milepost():
    # out-and-back route: the site is equally near the outbound and return legs
    r = build_route_profile("v", [GeoPoint(0, 0), GeoPoint(0, 1), GeoPoint(0, 0.5)])
    mp, _ = snap_site(GeoPoint(0.01, 0.75), r)
    assert mp == pytest.approx(0.75 * MI_PER_DEG, abs=1e-6)


def _sample_polyline(route, n):
    mp = np.array(route.mileposts)
    m = np.linspace(0, mp[-1], n)
    return np.interp(m, mp, route.lats), np.interp(m, mp, route.lons)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_snap_optimal_against_dense_sampling(seed):
    rng = np.random.default_rng(seed)
    k = int(rng.integers(2, 6))
    lats = 30 + np.cumsum(rng.uniform(-0.3, 0.3, k))
    lons = -100 + np.cumsum(rng.uniform(0.1, 0.8, k))
    route = build_route_profile("r", [GeoPoint(a, b) for a, b in zip(lats, lons)])
    site = GeoPoint(float(rng.uniform(lats.min() - 0.3, lats.max() + 0.3)),
                    float(rng.uniform(lons.min() - 0.3, lons.max() + 0.3)))
    _, d = snap_site(site, route)
    slat, slon = _sample_polyline(route, 10_000)
    best = min(haversine(site, GeoPoint(a, b)) for a, b in zip(slat[::1], slon[::1]))
    assert d <= best + 0.05


def test_filter_candidates_examples():
    routes = {"a": equator_route("a", 300)}
    on = site_on_equator("on", 100)
    far = site_on_equator("far", 150, offset_mi=6.0)
    kept = filter_candidates([on, far], routes, 5.0)
    assert [s.site_id for s in kept] == ["on"]
    assert kept[0].snaps["a"][0] == pytest.approx(100, abs=1e-6)
    assert kept[0].snaps["a"][1] == pytest.approx(0, abs=1e-9)
    assert filter_candidates([], routes, 5.0) == []
    with pytest.raises(ValueError):
        filter_candidates([on], routes, 0)


def test_filter_snaps_every_route_within_radius():
    routes = {"a": equator_route("a", 300), "b": equator_route("b", 300, lat=3 * DEG_PER_MI),
              "c": equator_route("c", 300, lat=20 * DEG_PER_MI)}
    [s] = filter_candidates([site_on_equator("x", 50, 1.0)], routes, 5.0)
    assert sorted(s.snaps) == ["a", "b"]
    assert all(d <= 5.0 for _, d in s.snaps.values())


def test_filter_idempotent(rng):
    routes = {"a": equator_route("a", 400, cuts=(150,)), "b": equator_route("b", 200, lat=4 * DEG_PER_MI)}
    sites = [site_on_equator(f"s{i}", rng.uniform(-20, 420), rng.uniform(-9, 9)) for i in range(60)]
    once = filter_candidates(sites, routes, 5.0)
    assert filter_candidates(once, routes, 5.0) == once
    for s in once:
        for mp, d in s.snaps.values():
            assert d <= 5.0 and 0 <= mp <= 400 + 1e-9


def test_raster_examples():
    sites = raster_candidates(RegionGrid(30, 31, -100, -99, 0.5, 0.5))
    assert [(s.location.lat, s.location.lon) for s in sites] == [
        (30.25, -99.75), (30.25, -99.25), (30.75, -99.75), (30.75, -99.25)]
    [one] = raster_candidates(RegionGrid(30, 31, -100, -99, 1, 1))
    assert (one.location.lat, one.location.lon) == (30.5, -99.5)
    assert len(raster_candidates(RegionGrid(30, 31, -100, -98.5, 1, 1))) == 2
    assert len(raster_candidates(RegionGrid(0, 1.1, 0, 1, 0.1, 1))) == 11


def test_raster_deterministic():
    g = RegionGrid(29, 31.3, -101, -97.4, 0.25, 0.4)
    a, b = raster_candidates(g), raster_candidates(g)
    assert a == b
    assert len({s.site_id for s in a}) == len(a) == 10 * 9
    assert a[0].site_id == "r0c0"
