"""Peak-load bandwidth accounting for the transcoding service.

Live transcoding moves every stream across the network twice: the source
rendition flows in, the target rendition flows back out.  At full load the
per-board uplink carries that for every stream of every SoC on the board,
so the uplink, not the codecs, can be the binding constraint.  These
checks are static worst-case arithmetic, not simulation: every unit is
assumed pinned at its measured stream capacity simultaneously.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .calibration import CalibKey, CalibrationTable, VideoProfile, lookup
from .topology import ClusterTopology

VERDICT_NONE = "none"
VERDICT_PCB = "pcb-saturated"
VERDICT_ESB = "esb-saturated"


@dataclass(frozen=True)
class StreamTraffic:
    """Bidirectional traffic of one live stream, in Mbps."""

    source_mbps: Fraction
    target_mbps: Fraction

    @property
    def total_mbps(self) -> Fraction:
        return self.source_mbps + self.target_mbps


@dataclass(frozen=True)
class UsageReport:
    link_kind: str
    streams: Fraction
    used_mbps: Fraction
    capacity_mbps: Fraction

    @property
    def fraction(self) -> Fraction:
        return self.used_mbps / self.capacity_mbps

    @property
    def saturated(self) -> bool:
        return self.used_mbps > self.capacity_mbps


def per_stream_traffic(profile: VideoProfile, overhead: Fraction = Fraction(1)) -> StreamTraffic:
    """Traffic of one stream; overhead scales for protocol framing."""
    if overhead < 1:
        raise ValueError("overhead multiplier must be >= 1")
    kbps_to_mbps = Fraction(1, 1000)
    return StreamTraffic(
        source_mbps=profile.source_bitrate_kbps * kbps_to_mbps * overhead,
        target_mbps=profile.target_bitrate_kbps * kbps_to_mbps * overhead,
    )


def streams_per_soc(table: CalibrationTable, profile: VideoProfile) -> tuple[Fraction, Fraction]:
    """Measured concurrent-stream capacity of one SoC: (cpu path, codec path)."""
    workload = f"video:{profile.name}"
    cpu = lookup(table, CalibKey("soc-cpu", "software-encode", workload, "max-streams-per-soc"))
    hw = lookup(table, CalibKey("soc-codec", "hw-codec", workload, "max-streams-per-soc"))
    return cpu.value, hw.value


def pcb_peak_usage(
    topo: ClusterTopology,
    profile: VideoProfile,
    table: CalibrationTable,
    overhead: Fraction = Fraction(1),
) -> UsageReport:
    """Uplink usage of one board with every SoC at full stream capacity.

    Boards are interchangeable at peak, so the first board stands for all.
    """
    cpu, hw = streams_per_soc(table, profile)
    socs_per_pcb = len(topo.pcbs[0].soc_ids)
    streams = socs_per_pcb * (cpu + hw)
    traffic = per_stream_traffic(profile, overhead)
    return UsageReport(
        link_kind="pcb-uplink",
        streams=streams,
        used_mbps=streams * traffic.total_mbps,
        capacity_mbps=topo.pcbs[0].uplink_mbps,
    )


def server_peak_usage(
    topo: ClusterTopology,
    profile: VideoProfile,
    table: CalibrationTable,
    overhead: Fraction = Fraction(1),
) -> UsageReport:
    pcb = pcb_peak_usage(topo, profile, table, overhead)
    return UsageReport(
        link_kind="esb",
        streams=pcb.streams * topo.pcb_count,
        used_mbps=pcb.used_mbps * topo.pcb_count,
        capacity_mbps=topo.esb_uplink_mbps,
    )


def bottleneck(
    topo: ClusterTopology,
    profile: VideoProfile,
    table: CalibrationTable,
    overhead: Fraction = Fraction(1),
) -> str:
    """Which link saturates first at peak load, if any.

    A saturated board uplink already caps the whole server, so it takes
    precedence over the switch-board verdict.
    """
    if pcb_peak_usage(topo, profile, table, overhead).saturated:
        return VERDICT_PCB
    if server_peak_usage(topo, profile, table, overhead).saturated:
        return VERDICT_ESB
    return VERDICT_NONE


def survey(
    topo: ClusterTopology,
    profiles,
    table: CalibrationTable,
    overhead: Fraction = Fraction(1),
) -> dict:
    """Per-video (pcb report, server report, verdict) across a profile list."""
    out = {}
    for profile in profiles:
        pcb = pcb_peak_usage(topo, profile, table, overhead)
        server = server_peak_usage(topo, profile, table, overhead)
        if pcb.saturated:
            verdict = VERDICT_PCB
        elif server.saturated:
            verdict = VERDICT_ESB
        else:
            verdict = VERDICT_NONE
        out[profile.name] = (pcb, server, verdict)
    return out
