import itertools
import time

import numpy as np
import pytest

from zevsite.demand import TripSpec
from zevsite.errors import NoCandidates, NonMonotoneAdoption, TooManyCandidates
from zevsite.siting import (
    GaConfig,
    Scenario,
    completion_curve,
    exhaustive_optimize,
    fitness,
    ga_optimize,
    mask_from_hex,
    mask_to_hex,
    rollout,
)
from zevsite.vehicle import fcev

from conftest import desk_scenario, equator_route, random_scenario, site_on_equator

FAST = GaConfig(population=60, generations=200, stall_limit=30, seed=3)


def brute_force(scn, cap=None):
    """Lexicographic optimum over all masks, simulating every mask in full."""
    best = None
    for bits in itertools.product([False, True], repeat=scn.n_candidates):
        if cap is not None and sum(bits) > cap:
            continue
        key = (len(scn.ledger(bits).stranded), sum(bits))
        if best is None or key < best[0]:
            best = (key, bits)
    return best


def test_fitness_examples():
    scn = desk_scenario(length=100, mileposts=[100.0 * i / 40 for i in range(40)])
    assert fitness([False] * 40, scn) == 0
    assert fitness([True] * 12 + [False] * 28, scn) == 12
    long = desk_scenario(length=1000, mileposts=[0.0] * 40, n_trips=3)
    assert fitness([True] * 5 + [False] * 35, long) == 3 * 41 + 5
    assert fitness([True] * 5 + [False] * 35, long, cardinality_cap=5) == 3


def test_fast_evaluation_matches_simulation(rng):
    for _ in range(25):
        scn = random_scenario(rng)
        masks = rng.random((16, scn.n_candidates)) < 0.5
        fast = scn.stranded_counts(masks)
        slow = [len(scn.ledger(m).stranded) for m in masks]
        assert list(fast) == slow


def test_five_candidate_example():
    scn = desk_scenario()
    brute = brute_force(scn)
    assert brute[0] == (0, 1)
    ga = ga_optimize(scn, GaConfig(seed=1))
    assert (ga.station_count, ga.stranded_count) == (0 + 1, 0) and ga.feasible
    # every single site between milepost 40 and 560 works
    assert ga.site_ids[0] in {"S0", "S1", "S2", "S3", "S4"}
    ex = exhaustive_optimize(scn)
    assert (ex.station_count, ex.stranded_count) == (1, 0)
    assert ex.mask == (False, False, False, False, True)  # lowest mask index


def test_all_within_range_needs_nothing():
    scn = desk_scenario(length=300)
    assert ga_optimize(scn, FAST).station_count == 0
    assert exhaustive_optimize(scn).station_count == 0


def test_infeasible_returns_labelled_minimum():
    scn = desk_scenario(length=1200, n_trips=2)
    ga = ga_optimize(scn, FAST)
    ex = exhaustive_optimize(scn)
    assert not ga.feasible and ga.stranded_count == ex.stranded_count == 2
    assert ga.summary()["feasible"] is False
    assert ga.station_count == ex.station_count == 0


def test_exhaustive_edges():
    scn = Scenario([TripSpec("t", "r", "forward", 0, "fcev_70kg")], {"r": equator_route("r", 100)},
                   {"fcev_70kg": fcev(70)}, [])
    sol = exhaustive_optimize(scn)
    assert sol.mask == () and sol.stranded_count == 0
    with pytest.raises(NoCandidates):
        ga_optimize(scn)
    with pytest.raises(TooManyCandidates):
        exhaustive_optimize(desk_scenario(mileposts=range(21)))


def test_exhaustive_matches_full_simulation(rng):
    for _ in range(8):
        scn = random_scenario(rng, n_cand=int(rng.integers(1, 8)), n_trips=6)
        (s, c), _ = brute_force(scn)
        ex = exhaustive_optimize(scn)
        assert (ex.stranded_count, ex.station_count) == (s, c)


def test_exhaustive_twenty_candidates_time_budget():
    scn = desk_scenario(length=2400, mileposts=np.linspace(50, 2350, 20), n_trips=30)
    t0 = time.perf_counter()
    sol = exhaustive_optimize(scn)
    assert time.perf_counter() - t0 < 60
    assert sol.stranded_count == 0


def test_ga_seed_determinism_and_reverification(rng):
    scn = random_scenario(rng, n_cand=12, n_trips=25)
    a, b = ga_optimize(scn, FAST), ga_optimize(scn, FAST)
    assert a.mask == b.mask and a.fitness == b.fitness and a.generations_run == b.generations_run
    assert a.stranded_count == len(scn.ledger(a.mask).stranded)
    par = ga_optimize(Scenario(scn.trips, scn.routes, scn.classes, scn.candidates, workers=4), FAST)
    assert par.mask == a.mask


def test_ga_never_beats_exhaustive(rng):
    for _ in range(10):
        scn = random_scenario(rng, n_cand=10)
        ga, ex = ga_optimize(scn, FAST), exhaustive_optimize(scn)
        assert (ga.stranded_count, ga.station_count) >= (ex.stranded_count, ex.station_count)


def test_cardinality_cap_respected(rng):
    scn = random_scenario(rng, n_cand=12)
    sol = ga_optimize(scn, GaConfig(population=40, generations=40, seed=2, cardinality_cap=3))
    assert sol.station_count <= 3
    assert sol.fitness == sol.stranded_count


def test_ga_config_validation():
    with pytest.raises(ValueError):
        GaConfig(population=1)
    with pytest.raises(ValueError):
        GaConfig(population=4, elitism=4)
    with pytest.raises(ValueError):
        GaConfig(mutation_p=2)


def test_mask_hex_roundtrip():
    for bits in itertools.product([False, True], repeat=6):
        assert mask_from_hex(mask_to_hex(bits), 6) == bits
    assert mask_to_hex((True, False, False, False, False)) == "10"
    with pytest.raises(ValueError):
        mask_from_hex("ff", 5)


def test_curve_examples():
    scn = desk_scenario()
    curve = completion_curve(scn, FAST, [2, 1, 0])
    assert [p.completion_rate for p in curve.points] == [1.0, 1.0, 0.0]
    for p in curve.points:
        assert (brute_force(scn, p.k)[0][0] == 0) == (p.completion_rate == 1.0)
    assert curve.points[-1].surviving_trips == ()
    full = completion_curve(scn, FAST, [5])
    assert full.points[0].completion_rate == ga_optimize(scn, FAST).completion_rate
    with pytest.raises(ValueError):
        completion_curve(scn, FAST, [1, 2])


def test_curve_zero_is_no_station_completion():
    routes = {"a": equator_route("a", 600), "b": equator_route("b", 200)}
    trips = [TripSpec("t1", "a", "forward", 0, "v"), TripSpec("t2", "b", "forward", 0, "v"),
             TripSpec("t3", "b", "reverse", 0, "v")]
    from zevsite.geo import filter_candidates
    cands = filter_candidates([site_on_equator("S", 300)], routes)
    scn = Scenario(trips, routes, {"v": fcev(70, class_id="v")}, cands)
    [p] = completion_curve(scn, FAST, [0]).points
    assert p.completion_rate == pytest.approx(2 / 3)
    assert p.surviving_trips == ("t2", "t3")


def test_rollout_examples():
    scn = desk_scenario(n_trips=4)
    [(y1)] = rollout(scn, [1.0], FAST)
    assert y1.solution.mask == ga_optimize(scn, FAST).mask
    y = rollout(scn, [1.0, 1.0], FAST)
    assert y[1].solution.mask == y[0].solution.mask and y[1].new_sites == ()
    with pytest.raises(NonMonotoneAdoption):
        rollout(scn, [0.5, 0.2], FAST)


def test_rollout_nested(rng):
    for _ in range(5):
        scn = random_scenario(rng, n_trips=30)
        years = rollout(scn, [0.1, 0.3, 0.6, 1.0], FAST)
        for a, b in zip(years, years[1:]):
            assert all(y or not x for x, y in zip(a.solution.mask, b.solution.mask))
            assert b.solution.station_count >= a.solution.station_count
            assert b.solution.station_count - a.solution.station_count == len(b.new_sites)
