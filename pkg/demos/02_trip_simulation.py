"""One fuel-cell truck driving a corridor under the refuel-when-needed policy."""

# %%
from pathlib import Path

from zevsite.demand import TripSpec
from zevsite.files import load_routes, load_sites
from zevsite.geo import filter_candidates
from zevsite.tripsim import active_sites_by_route, simulate_trip
from zevsite.vehicle import bev, fcev

DESK = Path(__file__).resolve().parent / "desk"
routes = load_routes(DESK / "routes.csv")
cands = filter_candidates(load_sites(DESK / "sites.csv"), routes, 5.0)
route = routes["I-1"]

# %% A 70 kg tank keeps a 20% reserve, so 56 kg (about 560 mi) is usable.
truck = fcev(70)
print(f"window {truck.window:.1f} kg, floor {truck.floor:.1f} kg")
sites = active_sites_by_route(cands, [True] * len(cands))["I-1"]
trip = TripSpec("demo", "I-1", "forward", 360.0, truck.class_id)
res = simulate_trip(trip, route, truck, sites)
print(f"completed={res.completed}, {len(res.stops)} stop(s)")
for s in res.stops:
    print(f"  {s.site_id} at mile {s.milepost:.1f}: arrived with {s.arrival_onboard:.2f} kg, took {s.dispensed:.2f} kg")
print(f"destination refill {res.destination_dispensed:.2f} kg")

# %% Without stations, a battery truck runs out well short of the end.
pack = bev(438)
trip = TripSpec("demo-bev", "I-1", "forward", 360.0, pack.class_id)
res = simulate_trip(trip, route, pack, [])
print(f"BEV 438 kWh stranded at milepost {res.stranded_milepost:.1f}")

# %% The energy trace never goes below the floor.
print(min(e for _, e in res.trace) >= pack.floor - 1e-9)
