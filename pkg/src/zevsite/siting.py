"""Station selection: GA, exhaustive enumeration, completion curves and multi-year rollout.

A mask is a boolean vector over candidate sites. Masks are ranked by
``stranded * (N + 1) + popcount`` so a single stranded trip outweighs any
saving in stations; ties go to fewer stations, then to the lexicographically
smallest mask (candidate 0 is the most significant bit, which is also the
order of :func:`mask_to_int`).
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

import numpy as np

from .demand import AdoptionSpec, TripSpec, apply_adoption
from .errors import NoCandidates, NonMonotoneAdoption, TooManyCandidates, ZevsiteError
from .geo import CandidateSite, RouteProfile
from .tripsim import DEFAULT_SPEED_MPH, EnergyProfile, FleetLedger, simulate_fleet
from .vehicle import ENERGY_TOL, VehicleClass

EXHAUSTIVE_LIMIT = 20
_CHUNK = 1 << 15


@dataclass
class _TripGroup:
    """Trips sharing route, class, direction and weight; they succeed or fail together."""

    site_idx: np.ndarray  # candidate indices in travel order
    site_energy: np.ndarray  # cumulative energy at those sites
    dest_energy: float
    window: float
    trips: list = field(default_factory=list)


class Scenario:
    """Trips, routes, vehicle classes and candidates, compiled for fast mask evaluation."""

    def __init__(
        self,
        trips: Sequence[TripSpec],
        routes: Mapping[str, RouteProfile],
        classes: Mapping[str, VehicleClass],
        candidates: Sequence[CandidateSite],
        speed_mph: float = DEFAULT_SPEED_MPH,
        workers: int = 1,
    ):
        self.trips = list(trips)
        self.routes = routes
        self.classes = classes
        self.candidates = list(candidates)
        self.speed_mph = speed_mph
        self.workers = max(1, int(workers))
        self._groups = self._compile()
        self._mult = np.array([len(g.trips) for g in self._groups], dtype=np.int64)

    @property
    def n_candidates(self) -> int:
        return len(self.candidates)

    def with_trips(self, trips: Sequence[TripSpec]) -> "Scenario":
        return Scenario(trips, self.routes, self.classes, self.candidates, self.speed_mph, self.workers)

    def _compile(self) -> list[_TripGroup]:
        groups: dict[tuple, _TripGroup] = {}
        for ti, t in enumerate(self.trips):
            key = (t.route_id, t.vehicle_class_id, t.direction, t.gross_weight_lb)
            if key not in groups:
                vc = self.classes[t.vehicle_class_id]
                prof = EnergyProfile(self.routes[t.route_id], vc, t.direction, t.gross_weight_lb)
                on_route = [(mp, c.site_id, i) for i, c in enumerate(self.candidates)
                            for rid, (mp, _) in c.snaps.items() if rid == t.route_id]
                # same visiting order as simulate_trip: forward-frame sort, mirrored for reverse
                on_route.sort()
                if prof.reverse:
                    on_route.reverse()
                pos = np.array([min(max(prof.travel_pos(mp), 0.0), prof.length) for mp, _, _ in on_route])
                groups[key] = _TripGroup(
                    np.array([i for _, _, i in on_route], dtype=np.intp),
                    np.asarray(prof.at(pos), dtype=float) if len(pos) else np.zeros(0),
                    prof.total, vc.window,
                )
            groups[key].trips.append(ti)
        return list(groups.values())

    def _infeasible(self, masks: np.ndarray) -> np.ndarray:
        """(P, G) matrix: group g strands under mask p."""
        P = masks.shape[0]
        out = np.empty((P, len(self._groups)), dtype=bool)
        for gi, g in enumerate(self._groups):
            limit = g.window + ENERGY_TOL
            k = g.site_idx.size
            if k == 0:
                out[:, gi] = g.dest_energy > limit
                continue
            active = masks[:, g.site_idx]
            vals = np.where(active, g.site_energy, -np.inf)
            # last[:, j]: energy at the last refuelling point before site j (origin counts)
            last = np.maximum.accumulate(np.concatenate([np.zeros((P, 1)), vals], axis=1), axis=1)
            gaps = np.where(active, g.site_energy - last[:, :k], 0.0).max(axis=1)
            out[:, gi] = np.maximum(gaps, g.dest_energy - last[:, k]) > limit
        return out

    def stranded_counts(self, masks) -> np.ndarray:
        """Number of stranded trips for each row of a (P, N) boolean mask matrix."""
        masks = np.atleast_2d(np.asarray(masks, dtype=bool))
        if masks.shape[1] != self.n_candidates:
            raise ZevsiteError(f"mask width {masks.shape[1]} != candidate count {self.n_candidates}")
        if not self._groups:
            return np.zeros(masks.shape[0], dtype=np.int64)
        if self.workers > 1 and masks.shape[0] >= 2 * self.workers:
            parts = np.array_split(masks, self.workers)
            with ThreadPoolExecutor(max_workers=self.workers) as pool:
                inf = np.concatenate(list(pool.map(self._infeasible, parts)))
        else:
            inf = self._infeasible(masks)
        return inf.astype(np.int64) @ self._mult

    def surviving_trips(self, mask) -> list[str]:
        inf = self._infeasible(np.atleast_2d(np.asarray(mask, dtype=bool)))[0]
        ids = [self.trips[ti].trip_id for g, bad in zip(self._groups, inf) if not bad for ti in g.trips]
        return sorted(ids)

    def ledger(self, mask) -> FleetLedger:
        return simulate_fleet(self.trips, self.routes, self.classes, [bool(b) for b in mask],
                              self.candidates, self.speed_mph, self.workers)


def mask_to_int(mask) -> int:
    v = 0
    for b in mask:
        v = (v << 1) | bool(b)
    return v


def mask_to_hex(mask) -> str:
    n = len(mask)
    return format(mask_to_int(mask), f"0{max(1, -(-n // 4))}x") if n else "0"


def mask_from_hex(text: str, n: int) -> tuple[bool, ...]:
    v = int(text, 16)
    if v >> n:
        raise ZevsiteError(f"mask {text!r} has bits beyond {n} candidates")
    return tuple(bool((v >> (n - 1 - i)) & 1) for i in range(n))


def fitness(mask, scenario: Scenario, cardinality_cap: int | None = None) -> int:
    """Stranded-dominant penalty; with a cap, just the stranded count."""
    stranded = int(scenario.stranded_counts([mask])[0])
    if cardinality_cap is not None:
        return stranded
    return stranded * (scenario.n_candidates + 1) + int(np.count_nonzero(mask))


@dataclass(frozen=True)
class GaConfig:
    population: int = 200
    generations: int = 500
    tournament_k: int = 3
    crossover_p: float = 0.9
    mutation_p: float | None = None  # per bit; None means 1/N
    elitism: int = 2
    stall_limit: int = 50
    seed: int = 0
    cardinality_cap: int | None = None

    def __post_init__(self):
        if self.population < 2:
            raise ZevsiteError("population must be >= 2")
        if not 0 <= self.elitism < self.population:
            raise ZevsiteError("elitism must be in [0, population)")
        if self.tournament_k < 1:
            raise ZevsiteError("tournament_k must be >= 1")
        for name in ("crossover_p", "mutation_p"):
            p = getattr(self, name)
            if p is not None and not 0.0 <= p <= 1.0:
                raise ZevsiteError(f"{name} must be in [0, 1]")
        if self.generations < 0 or self.stall_limit < 1:
            raise ZevsiteError("generations must be >= 0 and stall_limit >= 1")
        if self.cardinality_cap is not None and self.cardinality_cap < 0:
            raise ZevsiteError("cardinality_cap must be >= 0")


@dataclass(frozen=True)
class SitingSolution:
    mask: tuple[bool, ...]
    station_count: int
    stranded_count: int
    completion_rate: float
    ledger: FleetLedger = field(repr=False)
    fitness: int
    generations_run: int
    site_ids: tuple[str, ...] = ()
    method: str = "ga"

    @property
    def feasible(self) -> bool:
        """False when some trip strands under every mask considered."""
        return self.stranded_count == 0

    def summary(self, seed: int | None = None) -> dict:
        return {
            "station_count": self.station_count,
            "stranded_count": self.stranded_count,
            "completion_rate": self.completion_rate,
            "fitness": self.fitness,
            "generations_run": self.generations_run,
            "seed": seed,
            "feasible": self.feasible,
            "method": self.method,
            "mask_hex": mask_to_hex(self.mask),
            "site_ids": list(self.site_ids),
        }


def _solution(scenario: Scenario, mask, cap, generations_run, method) -> SitingSolution:
    mask = tuple(bool(b) for b in mask)
    ledger = scenario.ledger(mask)
    stranded = len(ledger.stranded)
    count = sum(mask)
    fit = stranded if cap is not None else stranded * (scenario.n_candidates + 1) + count
    return SitingSolution(mask, count, stranded, ledger.completion_rate, ledger, fit, generations_run,
                          tuple(c.site_id for c, b in zip(scenario.candidates, mask) if b), method)


def _rank_keys(fit, masks):
    pop = masks.sum(axis=1)
    return sorted(range(len(fit)), key=lambda i: (fit[i], pop[i], masks[i].tobytes()))


def ga_optimize(
    scenario: Scenario,
    cfg: GaConfig = GaConfig(),
    pinned=None,
    initial: Sequence = (),
) -> SitingSolution:
    """Genetic search for the fewest stations that strand no trip.

    ``pinned`` forces bits on (rollout); ``initial`` adds seed individuals.
    When no mask is feasible the result is the minimal-stranded one, with
    ``feasible`` False.
    """
    n = scenario.n_candidates
    if n == 0:
        raise NoCandidates("genetic search needs at least one candidate site")
    rng = np.random.default_rng([int(cfg.seed), 0x6A])
    cap = cfg.cardinality_cap
    mut_p = cfg.mutation_p if cfg.mutation_p is not None else 1.0 / n
    pins = np.zeros(n, dtype=bool) if pinned is None else np.asarray(pinned, dtype=bool).copy()
    if pins.shape != (n,):
        raise ZevsiteError(f"pinned mask length {pins.size} != candidate count {n}")
    if cap is not None and pins.sum() > cap:
        raise ZevsiteError(f"{int(pins.sum())} pinned sites exceed cardinality cap {cap}")

    def repair(m):
        m |= pins
        if cap is not None:
            free = np.flatnonzero(m & ~pins)
            excess = int(m.sum()) - cap
            if excess > 0:
                m[rng.choice(free, size=excess, replace=False)] = False
        return m

    def evaluate(masks):
        stranded = scenario.stranded_counts(masks)
        if cap is not None:
            return stranded
        return stranded * (n + 1) + masks.sum(axis=1)

    seeds = [np.ones(n, dtype=bool)]
    if pins.any():
        seeds.append(pins.copy())
    seeds += [np.asarray(m, dtype=bool).copy() for m in initial]
    pop = [repair(m) for m in seeds[: cfg.population]]
    while len(pop) < cfg.population:
        pop.append(repair(rng.random(n) < 0.5))
    pop = np.array(pop)
    fit = evaluate(pop)
    order = _rank_keys(fit, pop)
    best_mask, best_key = pop[order[0]].copy(), (fit[order[0]], int(pop[order[0]].sum()), pop[order[0]].tobytes())

    stall = 0
    gens = 0
    for _ in range(cfg.generations):
        gens += 1
        rank = np.empty(len(pop), dtype=np.int64)
        rank[order] = np.arange(len(pop))
        children = [pop[i].copy() for i in order[: cfg.elitism]]
        while len(children) < cfg.population:
            a = rng.integers(0, len(pop), size=cfg.tournament_k)
            b = rng.integers(0, len(pop), size=cfg.tournament_k)
            p1, p2 = pop[a[np.argmin(rank[a])]], pop[b[np.argmin(rank[b])]]
            if rng.random() < cfg.crossover_p:
                child = np.where(rng.random(n) < 0.5, p1, p2)
            else:
                child = p1.copy()
            child ^= rng.random(n) < mut_p
            children.append(repair(child))
        pop = np.array(children)
        fit = evaluate(pop)
        order = _rank_keys(fit, pop)
        top = pop[order[0]]
        key = (fit[order[0]], int(top.sum()), top.tobytes())
        if key < best_key:
            best_key, best_mask = key, top.copy()
            stall = 0
        else:
            stall += 1
            if stall >= cfg.stall_limit:
                break
    return _solution(scenario, best_mask, cap, gens, "ga")


def exhaustive_optimize(scenario: Scenario, cardinality_cap: int | None = None, pinned=None) -> SitingSolution:
    """Enumerate every mask; lexicographic optimum (stranded, count, lowest mask index)."""
    n = scenario.n_candidates
    if n > EXHAUSTIVE_LIMIT:
        raise TooManyCandidates(f"{n} candidates exceed the exhaustive limit of {EXHAUSTIVE_LIMIT}")
    pins = 0 if pinned is None else mask_to_int(pinned)
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    best = None
    for start in range(0, 1 << n, _CHUNK):
        ints = np.arange(start, min(start + _CHUNK, 1 << n), dtype=np.int64)
        if pins:
            ints = ints[(ints & pins) == pins]
        masks = ((ints[:, None] >> shifts) & 1).astype(bool)
        pop = masks.sum(axis=1)
        stranded = scenario.stranded_counts(masks)
        key = stranded * (n + 1) + pop
        if cardinality_cap is not None:
            key = np.where(pop <= cardinality_cap, key, np.iinfo(np.int64).max)
        if key.size == 0:
            continue
        i = int(np.argmin(key))
        if best is None or key[i] < best[0]:
            best = (int(key[i]), masks[i])
    if best is None or best[0] == np.iinfo(np.int64).max:
        raise ZevsiteError("no mask satisfies the cap and pinned sites")
    return _solution(scenario, best[1], cardinality_cap, 0, "exhaustive")


@dataclass(frozen=True)
class CurvePoint:
    k: int
    completion_rate: float
    stranded_count: int
    mask: tuple[bool, ...]
    surviving_trips: tuple[str, ...]


@dataclass(frozen=True)
class CompletionCurve:
    points: tuple[CurvePoint, ...]


def completion_curve(scenario: Scenario, cfg: GaConfig, k_values: Sequence[int]) -> CompletionCurve:
    """Best completion rate found with at most ``k`` stations, for each ``k`` (descending)."""
    k_values = [int(k) for k in k_values]
    if any(b >= a for a, b in zip(k_values, k_values[1:])):
        raise ZevsiteError(f"k_values must be strictly decreasing, got {k_values}")
    if any(k < 0 or k > scenario.n_candidates for k in k_values):
        raise ZevsiteError(f"k_values must lie in [0, {scenario.n_candidates}]")
    masks = []
    prev = None
    for k in k_values:
        initial = () if prev is None else [prev]
        sol = ga_optimize(scenario, replace(cfg, cardinality_cap=k), initial=initial)
        masks.append(np.array(sol.mask))
        prev = masks[-1]
    # a mask that fits under k also fits under any larger k: carry better results upward
    stranded = [int(scenario.stranded_counts([m])[0]) for m in masks]
    for i in range(len(k_values) - 2, -1, -1):
        if stranded[i + 1] < stranded[i]:
            masks[i], stranded[i] = masks[i + 1], stranded[i + 1]
    total = len(scenario.trips)
    points = []
    for k, m, s in zip(k_values, masks, stranded):
        rate = 1.0 if total == 0 else (total - s) / total
        points.append(CurvePoint(k, rate, s, tuple(bool(b) for b in m), tuple(scenario.surviving_trips(m))))
    return CompletionCurve(tuple(points))


@dataclass(frozen=True)
class RolloutYear:
    year: int
    adoption_fraction: float
    solution: SitingSolution
    new_sites: tuple[str, ...]


def rollout(
    scenario: Scenario,
    adoption_by_year: Sequence[float],
    cfg: GaConfig = GaConfig(),
    mode: str = "deterministic",
) -> list[RolloutYear]:
    """Year-by-year siting where every year keeps all sites opened before it."""
    fr = [float(f) for f in adoption_by_year]
    if any(b < a for a, b in zip(fr, fr[1:])):
        raise NonMonotoneAdoption(f"adoption fractions must be non-decreasing, got {fr}")
    out = []
    pinned = None
    for year, f in enumerate(fr, start=1):
        trips = apply_adoption(scenario.trips, AdoptionSpec(f, mode, cfg.seed + year - 1))
        sol = ga_optimize(scenario.with_trips(trips), cfg, pinned=pinned)
        before = np.zeros(scenario.n_candidates, dtype=bool) if pinned is None else pinned
        new = tuple(c.site_id for c, b, was in zip(scenario.candidates, sol.mask, before) if b and not was)
        out.append(RolloutYear(year, f, sol, new))
        pinned = np.array(sol.mask)
    return out
