from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from socplan.collab import (
    CollabModel,
    Infeasible,
    calibrate_from_shares,
    comm_time,
    compute_time,
    fit_amdahl,
    resnet50_width_split,
    speedup,
    total_latency,
)


def test_fit_is_exact():
    assert fit_amdahl(80, 34, 5) == Fraction(9, 32)


def test_fit_clamps_with_warning():
    with pytest.warns(UserWarning):
        assert fit_amdahl(80, 90, 5) == 1
    with pytest.warns(UserWarning):
        assert fit_amdahl(80, 10, 5) == 0


def test_fit_validation():
    with pytest.raises(Infeasible):
        fit_amdahl(80, 34, 1)
    with pytest.raises(Infeasible):
        fit_amdahl(0, 34, 5)


def test_compute_time_endpoints():
    model = CollabModel(t1_ms=Fraction(80), serial_fraction=Fraction(9, 32))
    assert compute_time(model, 1) == 80
    assert compute_time(model, 5) == 34


@given(
    t1=st.fractions(min_value=1, max_value=1000),
    f=st.fractions(min_value=0, max_value=1),
    n=st.integers(min_value=1, max_value=59),
)
def test_compute_time_never_increases_with_more_socs(t1, f, n):
    model = CollabModel(t1_ms=t1, serial_fraction=f)
    assert compute_time(model, n + 1) <= compute_time(model, n) <= t1
    assert compute_time(model, n) >= t1 * f


def test_comm_time_is_zero_alone():
    model = CollabModel(t1_ms=Fraction(80), serial_fraction=Fraction(0),
                        comm_setup_ms=Fraction(3), comm_per_extra_soc_ms=Fraction(2))
    assert comm_time(model, 1) == 0
    assert comm_time(model, 4) == 3 + 2 * 3


def test_comm_table_overrides_linear_term():
    model = CollabModel(
        t1_ms=Fraction(80), serial_fraction=Fraction(0),
        comm_per_extra_soc_ms=Fraction(2), comm_table=((3, Fraction(99)),),
    )
    assert comm_time(model, 3) == 99
    assert comm_time(model, 4) == 6


def test_single_soc_is_the_baseline():
    model = resnet50_width_split()
    assert total_latency(model, 1).total_ms == 80
    assert speedup(model, 1) == 1


def test_calibrated_shares_are_reproduced_exactly():
    model = calibrate_from_shares(80, 34, 5, Fraction("0.415"), Fraction("0.229"))
    assert total_latency(model, 5).comm_share == Fraction("0.415")
    assert total_latency(model, 5, pipelined=True).comm_share == Fraction("0.229")


def test_pipelining_cannot_worsen_latency():
    model = resnet50_width_split()
    for n in range(1, 10):
        assert total_latency(model, n, pipelined=True).total_ms <= total_latency(model, n).total_ms


def test_share_validation():
    with pytest.raises(Infeasible):
        calibrate_from_shares(80, 34, 5, Fraction(1))
    with pytest.raises(Infeasible):
        calibrate_from_shares(80, 34, 5, Fraction("0.2"), Fraction("0.3"))


def test_compute_only_speedup_matches_measurement():
    model = resnet50_width_split()
    assert compute_time(model, 1) / compute_time(model, 5) == Fraction(80, 34)


def test_breakdown_is_consistent():
    model = resnet50_width_split()
    b = total_latency(model, 5, pipelined=True)
    assert b.total_ms == b.compute_ms + b.exposed_comm_ms
    assert b.exposed_comm_ms == b.comm_ms * (1 - model.overlap_fraction)


def test_model_validation():
    with pytest.raises(Infeasible):
        CollabModel(t1_ms=Fraction(0), serial_fraction=Fraction(1, 2))
    with pytest.raises(Infeasible):
        CollabModel(t1_ms=Fraction(10), serial_fraction=Fraction(3, 2))
    with pytest.raises(Infeasible):
        CollabModel(t1_ms=Fraction(10), serial_fraction=Fraction(1, 2),
                    overlap_fraction=Fraction(2))
