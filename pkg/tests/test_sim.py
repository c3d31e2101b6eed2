import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from socplan.power import energy_of_trace
from socplan.sim import (
    Arrivals,
    InvalidScenario,
    MetricsReport,
    Policy,
    RateTrace,
    Scenario,
    UnitPool,
    Workload,
    WorkloadStats,
    canonical_json,
    check_conservation,
    example_scenario,
    load_scenario,
    run,
    soc_cluster_pool,
    synth_trace,
)


def _batch_scenario(count, capacity, units=10, policy="consolidate", **kwargs):
    return Scenario(
        name="batch",
        horizon_ms=Fraction(1000),
        pools=(UnitPool("soc", units, ("cpu", "codec")),),
        workloads=(
            Workload(
                name="w",
                pool="soc",
                engine="cpu",
                unit_capacity=capacity,
                arrivals=Arrivals("batch", count=count),
            ),
        ),
        policy=Policy(policy),
        **kwargs,
    )


@pytest.mark.parametrize("count,capacity", [(1, 13), (13, 13), (14, 13), (30, 13), (60, 7)])
def test_consolidation_packs_minimal_units(count, capacity):
    report = run(_batch_scenario(count, capacity))
    assert report.busy_units_end == math.ceil(count / capacity)
    occupancies = [items for _, items in report.occupancy_end]
    assert sum(occupancies) == count
    assert occupancies[:-1] == [capacity] * (len(occupancies) - 1)


def test_spread_balances_load():
    report = run(_batch_scenario(10, 13, units=5, policy="spread"))
    assert report.busy_units_end == 5
    assert [items for _, items in report.occupancy_end] == [2] * 5


def test_random_policy_is_seeded():
    scenario = _batch_scenario(20, 13, policy="random")
    a = run(scenario, seed=9)
    b = run(scenario, seed=9)
    assert canonical_json(a) == canonical_json(b)


def test_overflow_is_rejected_not_queued():
    report = run(_batch_scenario(5, 2, units=2))
    (_, stats), = report.workloads
    assert stats.placed == 4
    assert stats.rejected == 1
    assert stats.active_at_end == 4


def test_completions_free_capacity():
    scenario = Scenario(
        name="turnover",
        horizon_ms=Fraction(2000),
        pools=(UnitPool("soc", 1, ("cpu",)),),
        workloads=(
            Workload(
                name="w",
                pool="soc",
                engine="cpu",
                unit_capacity=1,
                arrivals=Arrivals("constant-rate", rate_per_s=10),
                service_ms=Fraction(50),
            ),
        ),
    )
    report = run(scenario)
    (_, stats), = report.workloads
    assert stats.rejected == 0
    assert stats.arrived == 20


def test_engine_exclusivity_blocks_mixed_placement():
    scenario = Scenario(
        name="lock",
        horizon_ms=Fraction(1000),
        pools=(UnitPool("soc", 1, ("cpu", "gpu")),),
        workloads=(
            Workload("cpu-w", "soc", "cpu", 8, Arrivals("batch", count=1)),
            Workload("gpu-w", "soc", "gpu", 8, Arrivals("batch", count=1)),
        ),
    )
    report = run(scenario)
    stats = dict(report.workloads)
    assert stats["cpu-w"].placed == 1
    assert stats["gpu-w"].rejected == 1


def test_codec_corun_needs_permission():
    def scenario(corun):
        return Scenario(
            name="corun",
            horizon_ms=Fraction(1000),
            pools=(UnitPool("soc", 1, ("cpu", "codec")),),
            workloads=(
                Workload("sw", "soc", "cpu", 13, Arrivals("batch", count=1)),
                Workload("hw", "soc", "codec", 16, Arrivals("batch", count=1)),
            ),
            policy=Policy("consolidate", allow_cpu_codec_corun=corun),
        )

    denied = dict(run(scenario(False)).workloads)
    assert denied["hw"].rejected == 1
    allowed = dict(run(scenario(True)).workloads)
    assert allowed["hw"].placed == 1


def test_idle_units_sleep_after_timeout():
    quiet = Scenario(
        name="quiet",
        horizon_ms=Fraction(3000),
        pools=(UnitPool("soc", 1, ("cpu",)),),
        workloads=(),
        idle_timeout_ms=Fraction(1000),
        idle_watts=Fraction(2),
    )
    # 2 W for the first second, dark afterwards
    joules = run(quiet).energy_joules
    assert abs(joules - 2) < Fraction(1, 1000)

    insomniac = Scenario(
        name="always-on",
        horizon_ms=Fraction(3000),
        pools=(UnitPool("soc", 1, ("cpu",)),),
        workloads=(),
        idle_timeout_ms=None,
        idle_watts=Fraction(2),
    )
    assert run(insomniac).energy_joules == 6


def test_wake_on_placement_restores_idle_power():
    scenario = Scenario(
        name="wake",
        horizon_ms=Fraction(4000),
        pools=(UnitPool("soc", 1, ("cpu",)),),
        workloads=(
            Workload(
                "w", "soc", "cpu", 1,
                Arrivals("batch", count=1, start_ms=Fraction(2000)),
                service_ms=Fraction(1000),
                watts_per_item=Fraction(3),
            ),
        ),
        idle_timeout_ms=Fraction(500),
        idle_watts=Fraction(2),
    )
    report = run(scenario)
    # awake-idle 0.5 s, asleep 1.5 s, active 1 s at 5 W, awake-idle 0.5 s, asleep 0.5 s
    expected = 2 * Fraction(1, 2) + 5 + 2 * Fraction(1, 2)
    assert abs(report.energy_joules - expected) < Fraction(1, 1000)


def test_report_energy_equals_trace_integral():
    report = run(_batch_scenario(30, 13, idle_watts=Fraction(1, 2)))
    assert report.energy_joules == energy_of_trace(report.trace)


def test_report_round_trips_through_dict():
    report = run(_batch_scenario(30, 13, idle_watts=Fraction(1, 2)), seed=3)
    assert MetricsReport.from_dict(report.to_dict()) == report
    assert check_conservation(report)


def test_conservation_detects_bad_reports():
    report = run(_batch_scenario(5, 2, units=2))
    broken = report.to_dict()
    broken["workloads"]["w"]["placed"] += 1
    assert not check_conservation(MetricsReport.from_dict(broken))


def test_poisson_arrivals_are_reproducible():
    scenario = Scenario(
        name="poisson",
        horizon_ms=Fraction(5000),
        pools=(soc_cluster_pool(4),),
        workloads=(
            Workload("w", "soc", "cpu", 2, Arrivals("poisson", rate_per_s=8),
                     service_ms=Fraction(300)),
        ),
        policy=Policy("random"),
    )
    assert canonical_json(run(scenario, seed=11)) == canonical_json(run(scenario, seed=11))


def test_diurnal_arrivals_follow_the_trace():
    trace = RateTrace(period_s=2.0, rates_per_s=(50.0, 0.0))
    scenario = Scenario(
        name="diurnal",
        horizon_ms=Fraction(4000),
        pools=(UnitPool("soc", 4, ("cpu",)),),
        workloads=(
            Workload("w", "soc", "cpu", 100,
                     Arrivals("diurnal", trace=trace), service_ms=Fraction(10)),
        ),
    )
    report = run(scenario, seed=2)
    (_, stats), = report.workloads
    assert stats.arrived > 0
    assert check_conservation(report)
    # arrivals only during the active half of each period
    again = run(scenario, seed=2)
    assert canonical_json(report) == canonical_json(again)


def test_scenario_validation():
    pool = UnitPool("soc", 1, ("cpu",))
    w = Workload("w", "soc", "cpu", 1, Arrivals("batch", count=1))
    with pytest.raises(InvalidScenario):
        Scenario(name="x", horizon_ms=Fraction(0), pools=(pool,), workloads=(w,))
    with pytest.raises(InvalidScenario):
        Scenario(name="x", horizon_ms=Fraction(10), pools=(), workloads=())
    with pytest.raises(InvalidScenario):
        Scenario(name="x", horizon_ms=Fraction(10), pools=(pool,),
                 workloads=(Workload("w", "soc", "dsp", 1, Arrivals("batch", count=1)),))
    with pytest.raises(InvalidScenario):
        Scenario(name="x", horizon_ms=Fraction(10), pools=(pool,),
                 workloads=(Workload("w", "nope", "cpu", 1, Arrivals("batch", count=1)),))
    with pytest.raises(InvalidScenario):
        Scenario(name="x", horizon_ms=Fraction(10), pools=(pool,),
                 workloads=(Workload("w", "soc", "cpu", 1,
                                     Arrivals("batch", count=1, start_ms=Fraction(10))),))
    with pytest.raises(InvalidScenario):
        Arrivals("sometimes")
    with pytest.raises(InvalidScenario):
        Arrivals("poisson", rate_per_s=0)
    with pytest.raises(InvalidScenario):
        Policy("pack")


def test_example_scenario_loads_and_runs():
    scenario = load_scenario(example_scenario())
    report = run(scenario, seed=1)
    assert check_conservation(report)


def test_load_scenario_requires_schema():
    doc = example_scenario()
    doc["schema"] = "scenario/v0"
    with pytest.raises(InvalidScenario):
        load_scenario(doc)


def test_load_scenario_from_file(tmp_path):
    import json

    path = tmp_path / "scenario.json"
    path.write_text(json.dumps(example_scenario()), encoding="utf-8")
    assert load_scenario(path) == load_scenario(example_scenario())


def test_flat_trace_has_no_jitter():
    trace = synth_trace(100.0, 1.0, seed=7)
    assert set(trace.rates_per_s) == {100.0}


def test_trace_without_jitter_hits_the_ratio():
    trace = synth_trace(100.0, 25.0, buckets=48, jitter=0.0)
    assert max(trace.rates_per_s) / min(trace.rates_per_s) == pytest.approx(25.0)


def test_trace_is_seed_stable():
    assert synth_trace(10.0, 5.0, seed=4) == synth_trace(10.0, 5.0, seed=4)
    assert synth_trace(10.0, 5.0, seed=4) != synth_trace(10.0, 5.0, seed=5)


def test_trace_rate_wraps_around():
    trace = RateTrace(period_s=10.0, rates_per_s=(1.0, 2.0))
    assert trace.rate_at(0.0) == 1.0
    assert trace.rate_at(6.0) == 2.0
    assert trace.rate_at(16.0) == 2.0


def test_trace_validation():
    with pytest.raises(InvalidScenario):
        synth_trace(0.0, 2.0)
    with pytest.raises(InvalidScenario):
        synth_trace(10.0, 0.5)
    with pytest.raises(InvalidScenario):
        RateTrace(period_s=1.0, rates_per_s=())


@settings(deadline=None, max_examples=60)
@given(
    count=st.integers(min_value=0, max_value=120),
    capacity=st.integers(min_value=1, max_value=16),
    units=st.integers(min_value=1, max_value=8),
)
def test_batch_placement_is_exactly_supply_limited(count, capacity, units):
    report = run(_batch_scenario(count, capacity, units=units))
    (_, stats), = report.workloads
    assert stats.placed == min(count, capacity * units)
    assert stats.rejected == count - stats.placed
    assert check_conservation(report)
