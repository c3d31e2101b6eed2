from fractions import Fraction

import pytest

from socplan.calibration import MissingCalibration
from socplan.defaults import default_calibration, video_profiles
from socplan.network import (
    bottleneck,
    pcb_peak_usage,
    per_stream_traffic,
    server_peak_usage,
    streams_per_soc,
    survey,
)
from socplan.topology import build_cluster, default_cluster

TOPO = default_cluster()
TABLE = default_calibration()
VIDEOS = video_profiles()


def test_per_stream_traffic_adds_both_directions():
    traffic = per_stream_traffic(VIDEOS["V1"])
    assert traffic.source_mbps == Fraction("2.8")
    assert traffic.target_mbps == Fraction("0.8198")
    assert traffic.total_mbps == Fraction("3.6198")


def test_stream_capacity_lookup():
    assert streams_per_soc(TABLE, VIDEOS["V1"]) == (13, 16)
    assert streams_per_soc(TABLE, VIDEOS["V5"]) == (3, 7)


def test_board_usage_is_exact():
    report = pcb_peak_usage(TOPO, VIDEOS["V2"], TABLE)
    assert report.streams == 155
    assert report.used_mbps == Fraction("42.0825")
    assert report.capacity_mbps == 1000
    assert not report.saturated


def test_server_usage_scales_by_board_count():
    for video in VIDEOS.values():
        pcb = pcb_peak_usage(TOPO, video, TABLE)
        server = server_peak_usage(TOPO, video, TABLE)
        assert server.used_mbps == pcb.used_mbps * 12
        assert server.streams == pcb.streams * 12
        assert server.capacity_mbps == 20000


def test_only_the_densest_video_saturates():
    verdicts = {name: bottleneck(TOPO, VIDEOS[name], TABLE) for name in VIDEOS}
    assert verdicts == {
        "V1": "none", "V2": "none", "V3": "none",
        "V4": "none", "V5": "pcb-saturated", "V6": "none",
    }


def test_board_verdict_takes_precedence():
    # shrink the switch board so both links saturate at once
    tight = build_cluster(esb_uplink_mbps=1000)
    assert bottleneck(tight, VIDEOS["V5"], TABLE) == "pcb-saturated"


def test_esb_saturation_reported_when_boards_fit():
    wide_boards = build_cluster(pcb_uplink_mbps=2000, esb_uplink_mbps=10000)
    assert bottleneck(wide_boards, VIDEOS["V5"], TABLE) == "esb-saturated"


def test_overhead_scales_linearly():
    base = pcb_peak_usage(TOPO, VIDEOS["V3"], TABLE)
    padded = pcb_peak_usage(TOPO, VIDEOS["V3"], TABLE, overhead=Fraction("1.2"))
    assert padded.used_mbps == base.used_mbps * Fraction("1.2")
    with pytest.raises(ValueError):
        per_stream_traffic(VIDEOS["V3"], overhead=Fraction("0.9"))


def test_survey_covers_all_profiles():
    results = survey(TOPO, VIDEOS.values(), TABLE)
    assert set(results) == set(VIDEOS)
    pcb, server, verdict = results["V5"]
    assert pcb.saturated and verdict == "pcb-saturated"
    assert server.used_mbps == pcb.used_mbps * 12


def test_missing_capacity_record_is_loud():
    from socplan.calibration import CalibrationTable

    empty = CalibrationTable([])
    with pytest.raises(MissingCalibration):
        pcb_peak_usage(TOPO, VIDEOS["V1"], empty)
