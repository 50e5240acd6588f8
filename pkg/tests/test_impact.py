import pytest
from hypothesis import given
from hypothesis import strategies as st

from zevsite.impact import (
    EXAMPLE_PATHWAYS,
    EXAMPLE_REFUEL,
    EnergyPathway,
    co2_annual,
    impact_report,
    pathway_ranking,
    refuel_rate,
)


def test_co2_examples():
    bev = EnergyPathway("bev_grid", 386.0, "kWh")
    assert co2_annual(1e6, 1.5625, bev) == pytest.approx(603.125)
    assert co2_annual(1e6, 0.10, EnergyPathway("h2_solar_electrolysis", 0.0, "kg")) == 0
    assert co2_annual(2e6, 1.5625, bev) == 2 * co2_annual(1e6, 1.5625, bev)
    with pytest.raises(ValueError):
        co2_annual(-1, 1, bev)


@given(st.floats(0, 1e7), st.floats(0, 1e3))
def test_co2_linear_in_vmt(vmt, alpha):
    p = EnergyPathway("x", 386.0)
    assert co2_annual(alpha * vmt, 1.5625, p) == pytest.approx(alpha * co2_annual(vmt, 1.5625, p), rel=1e-12, abs=1e-12)


def test_refuel_rate_anchors():
    assert refuel_rate(10, 10) == 100
    assert refuel_rate(62.5, 0.64) == pytest.approx(40, rel=1e-12)
    rates = {name: refuel_rate(r, e) for name, r, _, e in EXAMPLE_REFUEL}
    assert rates["diesel"] == 275
    assert rates["fcev_10kg_min"] == 100
    assert rates["bev_3750kW"] == pytest.approx(40, rel=1e-12)


def test_ranking_examples():
    a, b = EnergyPathway("a", 100), EnergyPathway("b", 50)
    assert pathway_ranking(impact_report(1e6, [b, a], {"kWh": 1.0})) == ["a", "b"]
    assert pathway_ranking(impact_report(1e6, [a], {"kWh": 1.0})) == ["a"]
    assert pathway_ranking(impact_report(1e6, EXAMPLE_PATHWAYS)) == [
        "h2_grid_electrolysis", "diesel", "h2_smr", "bev_grid", "h2_smr_ccs", "h2_solar_electrolysis"]


@given(st.floats(0.01, 1e3))
def test_ranking_scale_invariant(s):
    scaled = [EnergyPathway(p.name, p.carbon_intensity * s, p.unit) for p in EXAMPLE_PATHWAYS]
    assert pathway_ranking(impact_report(1e6, scaled)) == pathway_ranking(impact_report(1e6, EXAMPLE_PATHWAYS))


def test_ranking_follows_consumption_times_intensity(rng):
    ps = [EnergyPathway(f"p{i}", float(rng.uniform(0, 1000)), u) for i, u in enumerate(["kWh", "kg", "gal"] * 4)]
    cons = {"kWh": 1.5, "kg": 0.1, "gal": 0.18}
    rep = impact_report(5e5, ps, cons)
    expect = [p.name for p in sorted(ps, key=lambda p: -cons[p.unit] * p.carbon_intensity)]
    assert pathway_ranking(rep) == expect
