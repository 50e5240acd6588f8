"""Growing the network year by year as more of the fleet converts."""

# %%
from pathlib import Path

from zevsite.config import load_config
from zevsite.siting import rollout

cfg = load_config(Path(__file__).resolve().parent / "desk" / "config.json")
scn = cfg.scenario(adopt=False)

# %% Each year keeps every site opened before it and only adds new ones.
for y in rollout(scn, [0.1, 0.25, 0.5, 1.0], cfg.ga_config()):
    print(f"year {y.year}: {y.adoption_fraction:.0%} converted, "
          f"{y.solution.station_count} stations, new {list(y.new_sites)}")

# %% The same pipeline from a shell:
#   zevsite optimize --config demos/desk/config.json
#   zevsite size --config demos/desk/config.json
#   zevsite roadmap --config demos/desk/config.json
