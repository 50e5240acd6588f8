"""How many dispensers each site needs, and what the fleet emits per pathway."""

# %%
from pathlib import Path

from zevsite.config import load_config
from zevsite.impact import EXAMPLE_CONSUMPTION, EXAMPLE_PATHWAYS, EXAMPLE_REFUEL, impact_report, refuel_rate
from zevsite.siting import ga_optimize
from zevsite.sizing import EquipmentClass, dispenser_count, size_network

cfg = load_config(Path(__file__).resolve().parent / "desk" / "config.json")
sol = ga_optimize(cfg.scenario(), cfg.ga_config())

# %% Slower dispensers need more units for the same demand (10% utilization target).
for rate in (1.8, 3.6, 10.0):
    eq = EquipmentClass(f"h2_{rate}", "h2_dispenser", rate)
    rep = size_network(sol.ledger, eq, 0.1, 7 * 1440)
    print(f"{rate:>4} kg/min:", {s.site_id: (s.required_count, s.busiest_day_count) for s in rep.sites})

# %% The week's demand is thin. Squeezed into a single day it separates the rates.
sid, total = max(sol.ledger.inroute_totals.items(), key=lambda kv: kv[1])
for rate in (1.8, 3.6, 10.0):
    n = dispenser_count(total, EquipmentClass(f"h2_{rate}", "h2_dispenser", rate), 0.1, 1440)
    print(f"{rate:>4} kg/min: {n} unit(s) at {sid} for {total:.0f} kg in one day")

# %% Miles of range gained per minute at the pump or plug.
for name, rate, unit, econ in EXAMPLE_REFUEL:
    print(f"{name:16s} {refuel_rate(rate, econ):7.1f} mi/min")

# %% Annual CO2 for a million truck miles. Most intensities here are placeholders.
report = impact_report(1e6, EXAMPLE_PATHWAYS, EXAMPLE_CONSUMPTION)
for row in report.table():
    print(f"{row['pathway']:22s} {row['co2_tonnes_per_yr']:8.1f} t/yr")
