"""Capacity planning and simulation for edge servers built from mobile SoCs.

The package splits into small, independently usable layers:

  topology     cluster geometry: SoCs, boards, uplinks, the switch board
  calibration  provenance-tagged measurements that parametrize the models
  defaults     the bundled dataset and fitted curves
  network      peak-load bandwidth checks per video workload
  power        power curves, energy integration, throughput per energy
  tco          monthly cost of ownership, throughput per dollar
  collab       multi-SoC collaborative inference latency
  sim          discrete-event placement and energy simulator
  cli          the socplan executable

All model arithmetic is exact rational; floats appear only at display
boundaries and inside random arrival generation.
"""

from .calibration import (
    CalibKey,
    CalibrationError,
    CalibrationRecord,
    CalibrationTable,
    DlModelProfile,
    DuplicateKey,
    MissingCalibration,
    NegativeValue,
    ParseError,
    VideoProfile,
    load_calibration,
    lookup,
    lookup_value,
    serialize_calibration,
)
from .collab import (
    CollabModel,
    Infeasible,
    LatencyBreakdown,
    calibrate_from_shares,
    compute_time,
    comm_time,
    fit_amdahl,
    resnet50_width_split,
    speedup,
    total_latency,
)
from .defaults import (
    curve_from_streams_per_watt,
    default_calibration,
    default_cost_sheets,
    default_power_curves,
    dl_model_profiles,
    video_profiles,
)
from .network import (
    StreamTraffic,
    UsageReport,
    bottleneck,
    pcb_peak_usage,
    per_stream_traffic,
    server_peak_usage,
    streams_per_soc,
    survey,
)
from .power import (
    OutOfDomain,
    PowerCurve,
    PowerError,
    PowerTrace,
    TooFewSamples,
    TpEValue,
    UnitMismatch,
    ZeroDenominator,
    curve_tpe,
    efficiency_ratio,
    energy_of_trace,
    floor_plus_slope_curve,
    linear_curve,
    power_draw,
    proportionality_sweep,
    table_curve,
    tpe,
)
from .sim import (
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
from .tco import (
    CostError,
    CostSheet,
    MonthlyTco,
    TpCValue,
    amortized_capex,
    load_cost_sheet,
    monthly_electricity_cost,
    monthly_energy_kwh,
    monthly_tco,
    tpc,
)
from .topology import (
    ClusterTopology,
    InvalidTopology,
    Link,
    PcbBoard,
    SoCUnit,
    TraditionalServerSpec,
    UnknownSoC,
    build_cluster,
    default_cluster,
    default_edge_server,
    link_path,
    load_topology,
)

__version__ = "0.1.0"
