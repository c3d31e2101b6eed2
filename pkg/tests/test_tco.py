from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from socplan.tco import (
    CostError,
    CostSheet,
    amortized_capex,
    load_cost_sheet,
    monthly_electricity_cost,
    monthly_energy_kwh,
    monthly_tco,
    tpc,
)


def _sheet(**overrides):
    base = dict(
        label="demo",
        components=(("board", Fraction(3600)), ("psu", Fraction(360))),
        watts=Fraction(100),
    )
    base.update(overrides)
    return CostSheet(**base)


def test_capex_sums_components():
    assert _sheet().capex_usd == 3960


def test_amortization_is_linear():
    assert amortized_capex(_sheet()) == Fraction(3960, 36)
    assert amortized_capex(_sheet(lifetime_months=12)) == 330


def test_monthly_energy():
    # 100 W at half duty over a 720 h month
    assert monthly_energy_kwh(_sheet()) == 36


def test_electricity_includes_pue():
    sheet = _sheet()
    assert monthly_electricity_cost(sheet) == 36 * Fraction("0.0786") * 2


def test_tco_splits_overhead_evenly_at_pue_two():
    t = monthly_tco(_sheet())
    assert t.electricity_usd == t.pue_overhead_usd
    assert t.total_usd == t.amortized_capex_usd + t.electricity_usd + t.pue_overhead_usd


def test_idle_machine_costs_only_capex():
    t = monthly_tco(_sheet(utilization=Fraction(0)))
    assert t.electricity_usd == 0
    assert t.total_usd == t.amortized_capex_usd


def test_pue_one_has_no_overhead():
    t = monthly_tco(_sheet(pue=Fraction(1)))
    assert t.pue_overhead_usd == 0


def test_sheet_validation():
    with pytest.raises(CostError):
        _sheet(components=())
    with pytest.raises(CostError):
        _sheet(components=(("board", Fraction(-1)),))
    with pytest.raises(CostError):
        _sheet(pue=Fraction(1, 2))
    with pytest.raises(CostError):
        _sheet(utilization=Fraction(2))
    with pytest.raises(CostError):
        _sheet(lifetime_months=0)


def test_tpc_accepts_report_or_total():
    t = monthly_tco(_sheet())
    by_report = tpc(120, t, "streams-per-usd")
    by_total = tpc(120, t.total_usd, "streams-per-usd")
    assert by_report == by_total
    assert by_report.value == 120 / t.total_usd


def test_tpc_validation():
    with pytest.raises(CostError):
        tpc(10, Fraction(0), "streams-per-usd")
    with pytest.raises(CostError):
        tpc(10, Fraction(100), "streams-per-furlong")


def test_load_cost_sheet_round_trip():
    sheet = load_cost_sheet({
        "label": "demo",
        "components": [["board", "3600"], ["psu", 360]],
        "watts": "100",
        "utilization": "0.5",
    })
    assert sheet == _sheet()


def test_load_cost_sheet_errors():
    with pytest.raises(CostError):
        load_cost_sheet({"label": "x", "watts": 1})
    with pytest.raises(CostError):
        load_cost_sheet({"label": "x", "components": [["a", 1]], "watts": 1, "color": "red"})


@given(
    capex=st.fractions(min_value=1, max_value=Fraction(10**6)),
    months=st.integers(min_value=1, max_value=120),
    watts=st.fractions(min_value=0, max_value=Fraction(5000)),
    util=st.fractions(min_value=0, max_value=1),
    pue=st.fractions(min_value=1, max_value=3),
)
def test_total_is_capex_plus_facility_electricity(capex, months, watts, util, pue):
    sheet = CostSheet(
        label="prop",
        components=(("all", capex),),
        watts=watts,
        lifetime_months=months,
        utilization=util,
        pue=pue,
    )
    t = monthly_tco(sheet)
    assert t.total_usd == amortized_capex(sheet) + monthly_electricity_cost(sheet)
    assert t.pue_overhead_usd == t.electricity_usd * (pue - 1)
