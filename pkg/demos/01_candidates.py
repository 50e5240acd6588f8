"""Corridors, mileposts and candidate sites.

Run from anywhere: ``python3 demos/01_candidates.py``.
"""

# %%
from pathlib import Path

from zevsite.files import load_routes, load_sites
from zevsite.geo import GeoPoint, RegionGrid, filter_candidates, raster_candidates, snap_site

DESK = Path(__file__).resolve().parent / "desk"
routes = load_routes(DESK / "routes.csv")
for rid, r in routes.items():
    print(f"{rid}: {len(r.vertices)} vertices, {r.length:.1f} mi")

# %% Snapping a point returns the milepost of its projection and the offset.
mp, d = snap_site(GeoPoint(0.01, 1.0), routes["I-1"])
print(f"snapped to milepost {mp:.2f}, {d:.2f} mi off the road")

# %% Existing stops within 5 miles of a corridor become candidates.
# FAR is 30 miles off and is dropped; SP sits near the spur only.
cands = filter_candidates(load_sites(DESK / "sites.csv"), routes, 5.0)
for c in cands:
    snaps = ", ".join(f"{rid}@{m:.1f}" for rid, (m, _) in sorted(c.snaps.items()))
    print(f"{c.site_id:4s} {snaps}")

# %% A raster scan proposes grid centroids instead of existing stops.
grid = RegionGrid(lat_min=-0.2, lat_max=0.2, lon_min=0.0, lon_max=8.7, d_lat=0.4, d_lon=1.0)
raster = filter_candidates(raster_candidates(grid), routes, 5.0)
print(f"{grid.shape[0] * grid.shape[1]} raster cells, {len(raster)} within 5 mi of a route")
