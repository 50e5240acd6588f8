"""Scenario configuration: JSON schema, cross-reference checks, and loading into a Scenario."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import jsonschema

from .demand import AdoptionSpec, DepartureHistogram, apply_adoption, load_od_pairs, load_trips, sample_trips
from .errors import ZevsiteError
from .files import load_routes, load_sites
from .geo import DEFAULT_RADIUS_MI, RegionGrid, filter_candidates, raster_candidates
from .impact import EXAMPLE_PATHWAYS, load_pathways
from .siting import GaConfig, Scenario
from .sizing import EquipmentClass
from .tripsim import DEFAULT_SPEED_MPH
from .vehicle import load_vehicle_classes

_num = {"type": "number"}
_pos = {"type": "number", "exclusiveMinimum": 0}
_frac = {"type": "number", "minimum": 0, "maximum": 1}
_count = {"type": "integer", "minimum": 0}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["seed", "routes", "vehicle_classes"],
    "additionalProperties": False,
    "properties": {
        "seed": {"type": "integer", "minimum": 0},
        "routes": {"type": "string"},
        "sites": {"type": "string"},
        "raster": {
            "type": "object", "additionalProperties": False,
            "required": ["lat_min", "lat_max", "lon_min", "lon_max", "d_lat", "d_lon"],
            "properties": {k: _num for k in ("lat_min", "lat_max", "lon_min", "lon_max")}
            | {"d_lat": _pos, "d_lon": _pos},
        },
        "candidate_radius_mi": _pos,
        "trips": {"type": "string"},
        "od_weights": {"type": "string"},
        "sampling": {
            "type": "object", "additionalProperties": False,
            "required": ["n", "vehicle_class_id"],
            "properties": {"n": _count, "day_count": {"type": "integer", "minimum": 1},
                           "histogram": {"type": "string"}, "vehicle_class_id": {"type": "string"}},
        },
        "vehicle_classes": {"type": "string"},
        "pathways": {"type": "string"},
        "adoption": {
            "type": "object", "additionalProperties": False, "required": ["fraction"],
            "properties": {"fraction": _frac, "mode": {"enum": ["deterministic", "bernoulli"]}},
        },
        "ga": {
            "type": "object", "additionalProperties": False,
            "properties": {
                "population": {"type": "integer", "minimum": 2}, "generations": _count,
                "tournament_k": {"type": "integer", "minimum": 1}, "crossover_p": _frac,
                "mutation_p": _frac, "elitism": _count, "stall_limit": {"type": "integer", "minimum": 1},
            },
        },
        "sizing": {
            "type": "object", "additionalProperties": False,
            "required": ["equipment", "utilization_target", "horizon_min"],
            "properties": {
                "equipment": {
                    "type": "object", "additionalProperties": False, "required": ["name", "kind", "rate"],
                    "properties": {"name": {"type": "string"}, "kind": {"enum": ["h2_dispenser", "ev_charger"]},
                                   "rate": _pos},
                },
                "utilization_target": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
                "horizon_min": _pos,
            },
        },
        "speed_mph": _pos,
        "curve": {
            "type": "object", "additionalProperties": False, "required": ["k_values"],
            "properties": {"k_values": {"type": "array", "items": _count}},
        },
        "roadmap": {
            "type": "object", "additionalProperties": False, "required": ["adoption_by_year"],
            "properties": {"adoption_by_year": {"type": "array", "items": _frac, "minItems": 1},
                           "mode": {"enum": ["deterministic", "bernoulli"]}},
        },
        "impact": {
            "type": "object", "additionalProperties": False, "required": ["vmt_per_year"],
            "properties": {"vmt_per_year": {"type": "number", "minimum": 0},
                           "consumption": {"type": "object", "additionalProperties": _pos}},
        },
        "output_dir": {"type": "string"},
    },
}

FILE_KEYS = ("routes", "sites", "trips", "od_weights", "vehicle_classes", "pathways", "sampling/histogram")


class ConfigError(ZevsiteError):
    def __init__(self, diagnostics):
        self.diagnostics = diagnostics
        super().__init__("; ".join(f"{d['path']}: {d['message']}" for d in diagnostics))


def _pointer(parts) -> str:
    return "/" + "/".join(str(p).replace("~", "~0").replace("/", "~1") for p in parts) if parts else ""


def _get(raw, key):
    node = raw
    for part in key.split("/"):
        if not isinstance(node, dict) or part not in node:
            return None
        node = node[part]
    return node


@dataclass
class ScenarioConfig:
    raw: dict
    base_dir: Path
    seed: int
    paths: dict[str, Path] = field(default_factory=dict)

    def path(self, key) -> Path | None:
        return self.paths.get(key)

    @property
    def speed_mph(self) -> float:
        return float(self.raw.get("speed_mph", DEFAULT_SPEED_MPH))

    @property
    def radius(self) -> float:
        return float(self.raw.get("candidate_radius_mi", DEFAULT_RADIUS_MI))

    def ga_config(self, **over) -> GaConfig:
        return GaConfig(seed=self.seed, **(self.raw.get("ga", {}) | over))

    def equipment(self) -> EquipmentClass:
        return EquipmentClass(**self.raw["sizing"]["equipment"])

    def output_dir(self) -> Path:
        return self.base_dir / self.raw.get("output_dir", "out")

    # loading ---------------------------------------------------------

    def routes(self):
        return load_routes(self.paths["routes"])

    def classes(self):
        return load_vehicle_classes(self.paths["vehicle_classes"])

    def pathways(self):
        return load_pathways(self.paths["pathways"]) if "pathways" in self.paths else list(EXAMPLE_PATHWAYS)

    def raw_sites(self):
        sites = load_sites(self.paths["sites"]) if "sites" in self.paths else []
        if "raster" in self.raw:
            sites += raster_candidates(RegionGrid(**self.raw["raster"]))
        return sites

    def candidates(self, routes=None):
        return filter_candidates(self.raw_sites(), routes or self.routes(), self.radius)

    def base_trips(self, routes, classes):
        if "trips" in self.paths:
            return load_trips(self.paths["trips"], routes, classes)
        s = self.raw["sampling"]
        hist = (DepartureHistogram.load(self.paths["sampling/histogram"]) if "sampling/histogram" in self.paths
                else DepartureHistogram.default())
        return sample_trips(load_od_pairs(self.paths["od_weights"]), s["n"], hist, s.get("day_count", 1),
                            self.seed, s["vehicle_class_id"])

    def adopted(self, trips):
        a = self.raw.get("adoption")
        if not a:
            return list(trips)
        return apply_adoption(trips, AdoptionSpec(a["fraction"], a.get("mode", "deterministic"), self.seed))

    def scenario(self, workers=1, adopt=True) -> Scenario:
        routes, classes = self.routes(), self.classes()
        trips = self.base_trips(routes, classes)
        if adopt:
            trips = self.adopted(trips)
        return Scenario(trips, routes, classes, self.candidates(routes), self.speed_mph, workers)


def validate(config_path, seed_override: int | None = None) -> tuple[ScenarioConfig | None, list[dict]]:
    """Parse and cross-check a scenario config; return the config or every problem found."""
    config_path = Path(config_path)
    try:
        raw = json.loads(config_path.read_text())
    except (OSError, json.JSONDecodeError) as e:
        return None, [{"path": "", "message": f"cannot read config: {e}"}]
    if seed_override is not None and isinstance(raw, dict):
        raw["seed"] = int(seed_override)
    diags = [{"path": _pointer(e.absolute_path), "message": e.message}
             for e in sorted(jsonschema.Draft202012Validator(SCHEMA).iter_errors(raw), key=lambda e: list(map(str, e.absolute_path)))]
    if diags or not isinstance(raw, dict):
        return None, diags
    base = config_path.parent
    paths = {}
    for key in FILE_KEYS:
        val = _get(raw, key)
        if val is None:
            continue
        p = (base / val).resolve()
        if not p.is_file():
            diags.append({"path": "/" + key, "message": f"file not found: {val}"})
        paths[key] = p
    if ("trips" in raw) == ("od_weights" in raw):
        diags.append({"path": "", "message": "exactly one of 'trips' or 'od_weights' is required"})
    if "od_weights" in raw and "sampling" not in raw:
        diags.append({"path": "/sampling", "message": "'sampling' is required with 'od_weights'"})
    if "sites" not in raw and "raster" not in raw:
        diags.append({"path": "", "message": "one of 'sites' or 'raster' is required"})
    if diags:
        return None, diags
    cfg = ScenarioConfig(raw, base, int(raw["seed"]), paths)

    def attempt(ptr, fn):
        try:
            return fn()
        except ZevsiteError as e:
            diags.append({"path": ptr, "message": str(e)})
        except (OSError, ValueError, KeyError, TypeError) as e:
            diags.append({"path": ptr, "message": f"{type(e).__name__}: {e}"})

    routes = attempt("/routes", cfg.routes)
    classes = attempt("/vehicle_classes", cfg.classes)
    attempt("/sites" if "sites" in raw else "/raster", cfg.raw_sites)
    if "pathways" in paths:
        attempt("/pathways", cfg.pathways)
    if "sizing" in raw:
        attempt("/sizing/equipment", cfg.equipment)
    if "ga" in raw:
        attempt("/ga", cfg.ga_config)
    if routes is not None and classes is not None:
        if "trips" in paths:
            trips = attempt("/trips", lambda: load_trips(paths["trips"]))
            for row, t in enumerate(trips or (), start=2):
                if t.route_id not in routes:
                    diags.append({"path": "/trips", "message": f"row {row}: unknown route_id {t.route_id!r}"})
                if t.vehicle_class_id not in classes:
                    diags.append({"path": "/trips",
                                  "message": f"row {row}: unknown vehicle_class_id {t.vehicle_class_id!r}"})
        else:
            vcid = raw["sampling"]["vehicle_class_id"]
            if vcid not in classes:
                diags.append({"path": "/sampling/vehicle_class_id", "message": f"unknown vehicle class {vcid!r}"})
            pairs = attempt("/od_weights", lambda: load_od_pairs(paths["od_weights"]))
            for row, p in enumerate(pairs or (), start=2):
                if p.route_id not in routes:
                    diags.append({"path": "/od_weights", "message": f"row {row}: unknown route_id {p.route_id!r}"})
            if "sampling/histogram" in paths:
                attempt("/sampling/histogram", lambda: DepartureHistogram.load(paths["sampling/histogram"]))
    return (None if diags else cfg), diags


def load_config(config_path, seed_override: int | None = None) -> ScenarioConfig:
    cfg, diags = validate(config_path, seed_override)
    if diags:
        raise ConfigError(diags)
    return cfg


def canonical_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))
