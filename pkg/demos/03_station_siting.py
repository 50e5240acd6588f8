"""Choosing the fewest stations that strand nobody, then trading stations for completion."""

# %%
from pathlib import Path

from zevsite.config import load_config
from zevsite.siting import completion_curve, exhaustive_optimize, ga_optimize

cfg = load_config(Path(__file__).resolve().parent / "desk" / "config.json")
scn = cfg.scenario()
print(f"{len(scn.trips)} trips, {scn.n_candidates} candidate sites")

# %% The genetic search and full enumeration should agree on a small network.
ga = ga_optimize(scn, cfg.ga_config())
ex = exhaustive_optimize(scn)
print("GA:        ", ga.site_ids, "stranded", ga.stranded_count)
print("exhaustive:", ex.site_ids, "stranded", ex.stranded_count)

# %% In-route dispensed totals per chosen site.
for sid, total in sorted(ga.ledger.inroute_totals.items()):
    print(f"  {sid}: {total:.1f} kg")

# %% Fewer stations than needed means some trips strand.
curve = completion_curve(scn, cfg.ga_config(), range(scn.n_candidates, -1, -1))
for p in curve.points:
    print(f"k={p.k}: completion {p.completion_rate:.2f}")
