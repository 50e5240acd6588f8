import math

import numpy as np
import pytest

from zevsite.demand import TripSpec
from zevsite.geo import EARTH_RADIUS_MI, CandidateSite, GeoPoint, build_route_profile, filter_candidates
from zevsite.siting import Scenario
from zevsite.vehicle import bev, fcev

MI_PER_DEG = EARTH_RADIUS_MI * math.pi / 180
DEG_PER_MI = 1 / MI_PER_DEG


def equator_route(route_id, length_mi, cuts=(), multipliers=None, lat=0.0):
    """Straight east-bound route starting at lon 0; ``cuts`` are interior vertex mileposts."""
    mps = [0.0, *sorted(cuts), float(length_mi)]
    verts = [GeoPoint(lat, m * DEG_PER_MI) for m in mps]
    return build_route_profile(route_id, verts, multipliers)


def site_on_equator(site_id, milepost, offset_mi=0.0):
    return CandidateSite(site_id, GeoPoint(offset_mi * DEG_PER_MI, milepost * DEG_PER_MI))


FCEV_CLASSES = {vc.class_id: vc for vc in (fcev(70), fcev(80), fcev(100))}
BEV_CLASSES = {vc.class_id: vc for vc in (bev(438), bev(733), bev(1000))}
ALL_CLASSES = FCEV_CLASSES | BEV_CLASSES


def desk_scenario(length=600.0, mileposts=(100, 200, 300, 400, 500), vc=None, n_trips=1, workers=1):
    """One corridor, candidates on it, identical forward trips."""
    vc = vc or fcev(70)
    route = equator_route("I-1", length)
    routes = {"I-1": route}
    sites = [site_on_equator(f"S{i}", m) for i, m in enumerate(mileposts)]
    cands = filter_candidates(sites, routes, 5.0)
    trips = [TripSpec(f"T{i:03d}", "I-1", "forward", 60.0 * i, vc.class_id) for i in range(n_trips)]
    return Scenario(trips, routes, {vc.class_id: vc}, cands, 50.0, workers)


def random_scenario(rng, n_cand=None, n_trips=None, classes=None, max_len=1400.0):
    """Trunk corridor plus sub-routes and a parallel route; candidates on the trunk."""
    classes = classes or FCEV_CLASSES
    trunk = float(rng.uniform(500, max_len))
    routes = {"trunk": equator_route("trunk", trunk, multipliers=None)}
    for j in range(int(rng.integers(1, 3))):
        sub = float(rng.uniform(0.3, 1.0) * trunk)
        routes[f"sub{j}"] = equator_route(f"sub{j}", sub)
    routes["par"] = equator_route("par", float(rng.uniform(0.5, 1.0) * trunk), lat=2.0 * DEG_PER_MI)
    n_cand = int(rng.integers(1, 16)) if n_cand is None else n_cand
    sites = [site_on_equator(f"C{i:02d}", float(rng.uniform(0, trunk)), float(rng.uniform(-1, 1)))
             for i in range(n_cand)]
    cands = filter_candidates(sites, routes, 5.0)
    n_trips = int(rng.integers(1, 31)) if n_trips is None else n_trips
    rids = sorted(routes)
    cids = sorted(classes)
    trips = [TripSpec(f"T{i:03d}", rids[rng.integers(len(rids))], ("forward", "reverse")[rng.integers(2)],
                      float(rng.integers(0, 7 * 1440)), cids[rng.integers(len(cids))]) for i in range(n_trips)]
    return Scenario(trips, routes, classes, cands, 50.0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# acceptance reporting: one line per criterion in the terminal summary
_ACCEPTANCE = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(cid, title): acceptance criterion")


def pytest_runtest_logreport(report):
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        cid = getattr(report, "acceptance", None)
        if cid is not None:
            _ACCEPTANCE.setdefault(cid, []).append(report.outcome)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    m = item.get_closest_marker("acceptance")
    if m is not None:
        rep.acceptance = f"AC{m.args[0]}: {m.args[1]}"


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(_ACCEPTANCE, key=lambda c: int(c[2:].split(":")[0])):
        outs = _ACCEPTANCE[cid]
        ok = all(o == "passed" for o in outs)
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {cid}  ({len(outs)} check{'s' * (len(outs) != 1)})")
