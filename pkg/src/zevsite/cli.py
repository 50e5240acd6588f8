"""Command-line entry point: ``zevsite <subcommand> --config scenario.json``.

Every run writes its outputs plus ``manifest_<subcommand>.json`` holding the
config hash, input and output SHA-256 digests, tool version and seed.
Exit codes: 0 success, 1 runtime error (JSON on stderr), 2 invalid config.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

from . import __version__
from .config import ConfigError, canonical_json, load_config, validate
from .files import candidates_geojson, csv_text, json_text
from .impact import EXAMPLE_CONSUMPTION, EXAMPLE_REFUEL, impact_report, refuel_rate
from .siting import (
    completion_curve,
    exhaustive_optimize,
    ga_optimize,
    mask_from_hex,
    mask_to_hex,
    rollout,
)
from .sizing import charge_stats, size_network
from .tripsim import FleetLedger

SUBCOMMANDS = ("validate", "candidates", "simulate", "optimize", "curve", "size", "impact", "roadmap")

TRIP_RESULT_COLUMNS = ("trip_id", "completed", "stranded_milepost", "stop_count", "consumed", "destination_dispensed")
LEDGER_COLUMNS = ("site_id", "role", "total_dispensed", "unit", "event_count")


def sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


class Run:
    def __init__(self, cmd, cfg, out: Path, extra: dict):
        self.cmd, self.cfg, self.out = cmd, cfg, out
        self.extra = extra
        self.outputs: dict[str, str] = {}
        self.inputs = {key: sha256(p.read_bytes()) for key, p in sorted(cfg.paths.items())}

    def write(self, name: str, text: str):
        data = text.encode()
        (self.out / name).write_bytes(data)
        self.outputs[name] = sha256(data)

    def add_input(self, name: str, path: Path):
        self.inputs[name] = sha256(path.read_bytes())

    def finish(self):
        manifest = {
            "subcommand": self.cmd,
            "tool_version": __version__,
            "seed": self.cfg.seed,
            "config_hash": sha256(canonical_json({"config": self.cfg.raw, "options": self.extra}).encode()),
            "inputs": self.inputs,
            "outputs": dict(sorted(self.outputs.items())),
        }
        (self.out / f"manifest_{self.cmd}.json").write_text(json_text(manifest))
        return manifest


def _write_ledger(run: Run, ledger: FleetLedger):
    run.write("ledger.csv", csv_text(LEDGER_COLUMNS, ledger.rows()))
    run.write("ledger.json", json_text(ledger.to_dict()))
    run.write("trip_results.csv", csv_text(TRIP_RESULT_COLUMNS, [{
        "trip_id": r.trip_id, "completed": r.completed, "stranded_milepost": r.stranded_milepost,
        "stop_count": len(r.stops), "consumed": r.consumed, "destination_dispensed": r.destination_dispensed,
    } for r in ledger.results]))


def _solution_geojson(scn, sol) -> dict:
    totals = sol.ledger.inroute_totals
    return {"type": "FeatureCollection", "features": [{
        "type": "Feature",
        "geometry": {"type": "Point", "coordinates": [c.location.lon, c.location.lat]},
        "properties": {"site_id": c.site_id, "total_dispensed": totals.get(c.site_id, 0.0),
                       "event_count": len(sol.ledger.inroute.get(c.site_id, ()))},
    } for c, on in zip(scn.candidates, sol.mask) if on]}


def cmd_candidates(run, cfg, args):
    run.write("candidates.geojson", json_text(candidates_geojson(cfg.candidates())))


def cmd_simulate(run, cfg, args):
    scn = cfg.scenario(args.workers)
    n = scn.n_candidates
    choice = args.mask or "all"
    mask = (True,) * n if choice == "all" else (False,) * n if choice == "none" else mask_from_hex(choice, n)
    ledger = scn.ledger(mask)
    _write_ledger(run, ledger)
    run.write("summary.json", json_text({
        "mask_hex": mask_to_hex(mask), "station_count": sum(mask), "stranded_count": len(ledger.stranded),
        "completion_rate": ledger.completion_rate, "trip_count": ledger.trip_count, "seed": cfg.seed,
    }))


def cmd_optimize(run, cfg, args):
    scn = cfg.scenario(args.workers)
    sol = exhaustive_optimize(scn) if args.exact else ga_optimize(scn, cfg.ga_config())
    _write_ledger(run, sol.ledger)
    run.write("solution.geojson", json_text(_solution_geojson(scn, sol)))
    run.write("summary.json", json_text(sol.summary(cfg.seed)))


def cmd_curve(run, cfg, args):
    scn = cfg.scenario(args.workers)
    ks = cfg.raw.get("curve", {}).get("k_values") or list(range(scn.n_candidates, -1, -1))
    curve = completion_curve(scn, cfg.ga_config(), ks)
    run.write("curve.csv", csv_text(("k", "completion_rate", "stranded_count", "mask_hex"), [{
        "k": p.k, "completion_rate": p.completion_rate, "stranded_count": p.stranded_count,
        "mask_hex": mask_to_hex(p.mask)} for p in curve.points]))
    run.write("curve_trips.json", json_text({str(p.k): list(p.surviving_trips) for p in curve.points}))


def cmd_size(run, cfg, args):
    if "sizing" not in cfg.raw:
        raise ConfigError([{"path": "/sizing", "message": "'sizing' is required for the size subcommand"}])
    path = Path(args.ledger) if args.ledger else run.out / "ledger.json"
    if not path.is_file():
        raise FileNotFoundError(f"ledger {path} not found; run simulate or optimize first")
    run.add_input("ledger", path)
    ledger = FleetLedger.from_dict(json.loads(path.read_text()))
    s = cfg.raw["sizing"]
    report = size_network(ledger, cfg.equipment(), s["utilization_target"], s["horizon_min"])
    run.write("sizing.csv", csv_text(("site_id", "equipment", "rate", "unit", "busy_min", "horizon_min",
                                      "utilization_target", "required_count", "busiest_day_count"), report.rows()))
    stats, peaks = charge_stats(ledger, cfg.classes())
    run.write("charge_stats.csv", csv_text(("site_id", "event_time_min", "power_kw", "nameplate_kwh", "c_rate", "flagged"), [{
        "site_id": e.site_id, "event_time_min": e.event_time, "power_kw": e.power_kw,
        "nameplate_kwh": e.nameplate_kwh, "c_rate": e.c_rate, "flagged": e.flagged} for e in stats]))
    run.write("charge_peaks.csv", csv_text(("site_id", "peak_kw"),
                                           [{"site_id": k, "peak_kw": v} for k, v in sorted(peaks.items())]))


def cmd_impact(run, cfg, args):
    imp = cfg.raw.get("impact", {})
    consumption = EXAMPLE_CONSUMPTION | imp.get("consumption", {})
    report = impact_report(float(imp.get("vmt_per_year", 1e6)), cfg.pathways(), consumption)
    note = "intensities marked illustrative are example values, not measurements" if report.illustrative else None
    run.write("impact.csv", csv_text(("pathway", "intensity", "intensity_unit", "vmt", "consumption",
                                      "co2_tonnes_per_yr"), report.table(), comment=note))
    run.write("refuel_rates.csv", csv_text(("powertrain", "replenish_rate", "unit", "economy", "miles_per_min"), [{
        "powertrain": name, "replenish_rate": rate, "unit": unit, "economy": econ,
        "miles_per_min": refuel_rate(rate, econ)} for name, rate, unit, econ in EXAMPLE_REFUEL]))


def cmd_roadmap(run, cfg, args):
    if "roadmap" not in cfg.raw:
        raise ConfigError([{"path": "/roadmap", "message": "'roadmap' is required for the roadmap subcommand"}])
    rm = cfg.raw["roadmap"]
    scn = cfg.scenario(args.workers, adopt=False)
    years = rollout(scn, rm["adoption_by_year"], cfg.ga_config(), rm.get("mode", "deterministic"))
    run.write("roadmap.csv", csv_text(("year", "adoption_fraction", "station_count", "new_sites"), [{
        "year": y.year, "adoption_fraction": y.adoption_fraction, "station_count": y.solution.station_count,
        "new_sites": ";".join(y.new_sites)} for y in years]))


HANDLERS = {
    "candidates": cmd_candidates, "simulate": cmd_simulate, "optimize": cmd_optimize, "curve": cmd_curve,
    "size": cmd_size, "impact": cmd_impact, "roadmap": cmd_roadmap,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="zevsite", description="Zero-emission truck refuelling siting runs.")
    p.add_argument("subcommand", choices=SUBCOMMANDS)
    p.add_argument("--config", required=True, help="scenario JSON")
    p.add_argument("--out", help="output directory (default: config output_dir or ./out next to it)")
    p.add_argument("--seed", type=int, help="override the config seed")
    p.add_argument("--workers", type=int, default=1, help="parallel evaluation threads")
    p.add_argument("--exact", action="store_true", help="optimize by exhaustive enumeration (<= 20 candidates)")
    p.add_argument("--mask", help="simulate mask: hex, 'all' or 'none'")
    p.add_argument("--ledger", help="ledger.json consumed by size (default: <out>/ledger.json)")
    return p


def _fail(code, payload):
    sys.stderr.write(json.dumps(payload, sort_keys=True) + "\n")
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.subcommand == "validate":
        _, diags = validate(args.config, args.seed)
        if diags:
            return _fail(2, {"error": "ConfigError", "diagnostics": diags})
        print("config ok")
        return 0
    try:
        cfg = load_config(args.config, args.seed)
    except ConfigError as e:
        return _fail(2, {"error": "ConfigError", "diagnostics": e.diagnostics})
    out = Path(args.out) if args.out else cfg.output_dir()
    extra = {"subcommand": args.subcommand, "exact": args.exact, "mask": args.mask}
    try:
        out.mkdir(parents=True, exist_ok=True)
        run = Run(args.subcommand, cfg, out, extra)
        HANDLERS[args.subcommand](run, cfg, args)
        run.finish()
    except ConfigError as e:
        return _fail(2, {"error": "ConfigError", "diagnostics": e.diagnostics})
    except Exception as e:  # noqa: BLE001 - reported as machine-readable JSON
        return _fail(1, {"error": type(e).__name__, "message": str(e), "subcommand": args.subcommand})
    return 0


if __name__ == "__main__":
    sys.exit(main())
