"""Physical organization of a SoC cluster and of a comparison rack server.

A cluster is a pool of mobile SoCs soldered onto carrier boards (PCBs).
Each PCB acts as the power supply and network switch for its SoCs and
uplinks to a shared Ethernet switch board (ESB) that connects the whole
server to the outside world.  Everything here is immutable after
construction; validation happens once, up front.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
import json

PROCESSORS = frozenset({"cpu", "gpu", "dsp", "codec"})


class InvalidTopology(ValueError):
    """The requested shape cannot be built or violates a capacity invariant."""


class UnknownSoC(KeyError):
    """A SoC id does not exist in the topology."""


@dataclass(frozen=True)
class SoCUnit:
    id: int
    pcb_id: int
    processors: frozenset = PROCESSORS
    cpu_cores: int = 8
    ram_gb: int = 12
    storage_gb: int = 256

    def __post_init__(self):
        if self.cpu_cores <= 0 or self.ram_gb <= 0:
            raise InvalidTopology("SoC core count and RAM must be positive")


@dataclass(frozen=True)
class PcbBoard:
    id: int
    soc_ids: tuple
    uplink_mbps: Fraction = Fraction(1000)

    def __post_init__(self):
        if self.uplink_mbps <= 0:
            raise InvalidTopology("PCB uplink capacity must be positive")


@dataclass(frozen=True)
class Link:
    """One traversed segment of a SoC-to-SoC path."""

    kind: str  # soc-access | pcb-uplink | esb
    id: int
    capacity_mbps: Fraction


@dataclass(frozen=True)
class ClusterTopology:
    socs: tuple
    pcbs: tuple
    esb_uplink_mbps: Fraction = Fraction(20000)
    power_cap_watts: Fraction = Fraction(700)
    intra_soc_rtt_ms: Fraction = Fraction("0.44")
    intra_soc_tcp_mbps: Fraction = Fraction(903)

    def __post_init__(self):
        if self.esb_uplink_mbps <= 0 or self.power_cap_watts <= 0:
            raise InvalidTopology("server capacities must be positive")
        ids = [s.id for s in self.socs]
        if len(set(ids)) != len(ids):
            raise InvalidTopology("duplicate SoC ids")
        board_ids = [i for p in self.pcbs for i in p.soc_ids]
        if sorted(board_ids) != sorted(ids):
            raise InvalidTopology("PCB membership must partition the SoC set")
        by_id = {s.id: s for s in self.socs}
        for pcb in self.pcbs:
            for sid in pcb.soc_ids:
                if by_id[sid].pcb_id != pcb.id:
                    raise InvalidTopology(f"SoC {sid} disagrees with PCB {pcb.id} about membership")
        if self.pcbs and self.esb_uplink_mbps < max(p.uplink_mbps for p in self.pcbs):
            raise InvalidTopology("ESB uplink must be at least the largest PCB uplink")

    @property
    def soc_count(self) -> int:
        return len(self.socs)

    @property
    def pcb_count(self) -> int:
        return len(self.pcbs)

    def soc(self, soc_id: int) -> SoCUnit:
        for s in self.socs:
            if s.id == soc_id:
                return s
        raise UnknownSoC(soc_id)


@dataclass(frozen=True)
class TraditionalServerSpec:
    """Shape of a conventional rack server used for comparisons.

    Only the partitioning scheme is modeled: the CPU is sliced into
    independent 8-core units and each GPU is one unit.
    """

    label: str
    cpu_threads: int
    cpu_partitions: int = 10
    gpus: int = 0
    gpu_model: str = ""
    dram_gb: int = 0

    def __post_init__(self):
        if self.cpu_partitions * 8 > self.cpu_threads:
            raise InvalidTopology("partitions exceed available hardware threads")
        if self.gpus and not self.gpu_model:
            raise InvalidTopology("gpu_model required when gpus > 0")


def build_cluster(
    soc_count: int = 60,
    socs_per_pcb: int = 5,
    pcb_uplink_mbps=1000,
    esb_uplink_mbps=20000,
    power_cap_watts=700,
    intra_soc_rtt_ms=Fraction("0.44"),
    intra_soc_tcp_mbps=903,
    cpu_cores: int = 8,
    ram_gb: int = 12,
    storage_gb: int = 256,
) -> ClusterTopology:
    """Build a validated cluster with deterministic board-major ids.

    SoC k lives on PCB k // socs_per_pcb.  Raises InvalidTopology when the
    group size does not divide the SoC count or any capacity is
    nonpositive.
    """
    if soc_count <= 0 or socs_per_pcb <= 0:
        raise InvalidTopology("counts must be positive")
    if soc_count % socs_per_pcb != 0:
        raise InvalidTopology(
            f"{soc_count} SoCs cannot be grouped into boards of {socs_per_pcb}"
        )
    if min(pcb_uplink_mbps, esb_uplink_mbps, power_cap_watts, intra_soc_tcp_mbps) <= 0:
        raise InvalidTopology("capacities must be positive")
    socs = tuple(
        SoCUnit(
            id=k,
            pcb_id=k // socs_per_pcb,
            cpu_cores=cpu_cores,
            ram_gb=ram_gb,
            storage_gb=storage_gb,
        )
        for k in range(soc_count)
    )
    pcbs = tuple(
        PcbBoard(
            id=b,
            soc_ids=tuple(range(b * socs_per_pcb, (b + 1) * socs_per_pcb)),
            uplink_mbps=Fraction(pcb_uplink_mbps),
        )
        for b in range(soc_count // socs_per_pcb)
    )
    return ClusterTopology(
        socs=socs,
        pcbs=pcbs,
        esb_uplink_mbps=Fraction(esb_uplink_mbps),
        power_cap_watts=Fraction(power_cap_watts),
        intra_soc_rtt_ms=Fraction(intra_soc_rtt_ms),
        intra_soc_tcp_mbps=Fraction(intra_soc_tcp_mbps),
    )


def default_cluster() -> ClusterTopology:
    """The measured production shape: 60 SoCs on 12 boards of 5."""
    return build_cluster()


def default_edge_server() -> TraditionalServerSpec:
    return TraditionalServerSpec(
        label="edge-server",
        cpu_threads=80,
        cpu_partitions=10,
        gpus=8,
        gpu_model="nvidia-a40",
        dram_gb=768,
    )


def link_path(topo: ClusterTopology, src: int, dst: int) -> tuple:
    """Ordered links traversed by traffic from SoC src to SoC dst.

    Same-board pairs stay inside the PCB switch; cross-board pairs climb
    through both PCB uplinks and the ESB.
    """
    if src == dst:
        raise ValueError("src and dst must differ")
    a = topo.soc(src)
    b = topo.soc(dst)
    access = topo.intra_soc_tcp_mbps
    src_link = Link("soc-access", src, access)
    dst_link = Link("soc-access", dst, access)
    if a.pcb_id == b.pcb_id:
        return (src_link, dst_link)
    pcb_a = next(p for p in topo.pcbs if p.id == a.pcb_id)
    pcb_b = next(p for p in topo.pcbs if p.id == b.pcb_id)
    return (
        src_link,
        Link("pcb-uplink", pcb_a.id, pcb_a.uplink_mbps),
        Link("esb", 0, topo.esb_uplink_mbps),
        Link("pcb-uplink", pcb_b.id, pcb_b.uplink_mbps),
        dst_link,
    )


def load_topology(source) -> ClusterTopology:
    """Read cluster parameters from a JSON file path or an inline dict."""
    if isinstance(source, dict):
        params = source
    else:
        with open(source, "r", encoding="utf-8") as fh:
            params = json.load(fh)
    allowed = {
        "soc_count",
        "socs_per_pcb",
        "pcb_uplink_mbps",
        "esb_uplink_mbps",
        "power_cap_watts",
        "intra_soc_rtt_ms",
        "intra_soc_tcp_mbps",
        "cpu_cores",
        "ram_gb",
        "storage_gb",
    }
    unknown = set(params) - allowed
    if unknown:
        raise InvalidTopology(f"unknown topology fields: {sorted(unknown)}")
    return build_cluster(**params)
