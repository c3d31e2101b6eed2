"""Bundled measurement dataset and factory configurations.

Everything a fresh install needs to reproduce the reference analyses:
the calibration table transcribed from the published measurement study,
the six benchmark video profiles, the cost sheets for the three server
builds, and the power curves fitted to the efficiency measurements.

Values are kept as exact decimals.  Chart-derived numbers carry the
paper-figure-approx provenance tag and were chosen to agree with every
quoted ratio and printed cell simultaneously; numbers from tables or
prose carry paper-table / paper-text and match their source digits.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from .calibration import (
    CalibKey,
    CalibrationRecord,
    CalibrationTable,
    DlModelProfile,
    VideoProfile,
)
from .power import PowerCurve, floor_plus_slope_curve, linear_curve
from .tco import CostSheet

_VIDEO_ROWS = (
    # name, content, width, height, fps, entropy, source kbps, target kbps
    ("V1", "holi", 854, 480, 30, 7.0, "2800", "819.8"),
    ("V2", "desktop", 1280, 720, 30, 0.2, "181", "90.5"),
    ("V3", "game3", 1280, 720, 59, 6.1, "5600", "2700"),
    ("V4", "presentation", 1920, 1080, 25, 0.2, "430", "215"),
    ("V5", "hall", 1920, 1080, 29, 7.7, "16000", "4100"),
    ("V6", "chicken", 3840, 2160, 30, 5.9, "49000", "16600"),
)

# Concurrent live streams one unit sustains at its realtime deadline.
# SoC columns are table values; Intel (per 8-core partition) and A40
# (per GPU) come from the throughput charts, which is why they are
# fractional.
_STREAM_CAPACITY = {
    # video: (soc cpu path, soc codec path, intel partition, a40 gpu)
    "V1": ("13", "16", "25.2", "74"),
    "V2": ("15", "16", "31.2", "37"),
    "V3": ("4", "12", "8.0", "18"),
    "V4": ("9", "16", "14.1", "31.9"),
    "V5": ("3", "7", "5.9", "20.1"),
    "V6": ("1", "2", "1.85", "6"),
}

# Full-load efficiency in live streams per watt above idle, per unit,
# from the efficiency charts.
_LIVE_STREAMS_PER_WATT = {
    # video: (soc cpu, intel partition, a40 gpu)
    "V1": ("1.06", "0.36", "0.482"),
    "V2": ("1.2198", "0.38", "0.2695"),
    "V3": ("0.3225", "0.125", "0.176"),
    "V4": ("0.7344", "0.2682", "0.36"),
    "V5": ("0.244", "0.088", "0.125"),
    "V6": ("0.0813", "0.028", "0.0387"),
}

# Inference efficiency at full load, frames per joule above idle.
_INFERENCE_FRAMES_PER_JOULE = (
    ("soc-gpu", "tflite", "dl:resnet50-fp32", "18", "paper-text"),
    ("intel-cpu-8core", "tvm", "dl:resnet50-fp32", "2.539", "paper-figure-approx"),
    ("nvidia-a40", "tensorrt-bs64", "dl:resnet50-fp32", "10.11", "paper-figure-approx"),
    ("nvidia-a100", "tensorrt-bs64", "dl:resnet50-fp32", "15.65", "paper-figure-approx"),
    ("soc-dsp", "tflite", "dl:resnet152-int8", "21", "paper-figure-approx"),
    ("intel-cpu-8core", "tvm", "dl:resnet152-int8", "0.5", "paper-figure-approx"),
    ("nvidia-a100", "tensorrt-bs64", "dl:resnet152-int8", "14", "paper-figure-approx"),
)

_INFERENCE_LATENCY_NOTES = (
    ("soc-gpu", "tflite", "dl:resnet50-fp32", "32.7"),
    ("soc-dsp", "tflite", "dl:resnet50-int8", "8.8"),
    ("nvidia-a40", "tensorrt", "dl:resnet50-int8", "8.0"),
)

# Bare-metal vs containerized deployment study on one SoC.  Each row is
# (hardware, workload, metric, bare-metal (value, spread),
# containerized (value, spread)).
_DEPLOYMENT_ROWS = (
    ("soc-cpu", "dl:resnet50-fp32", "latency-ms", ("81.2", "0.2"), ("80.4", "0.1")),
    ("soc-cpu", "dl:resnet50-fp32", "cpu-util-pct", ("52.1", "0.3"), ("53.1", "0.1")),
    ("soc-cpu", "dl:resnet50-fp32", "gpu-util-pct", ("0.7", "0.3"), ("0.5", "0.1")),
    ("soc-cpu", "dl:resnet50-fp32", "mem-util-pct", ("32.3", "0.7"), ("37.7", "0.2")),
    ("soc-gpu", "dl:resnet50-fp32", "latency-ms", ("32.5", "0.4"), ("33.9", "0.1")),
    ("soc-gpu", "dl:resnet50-fp32", "cpu-util-pct", ("9.0", "5.7"), ("9.5", "0.1")),
    ("soc-gpu", "dl:resnet50-fp32", "gpu-util-pct", ("73.9", "1.2"), ("71.3", "0.6")),
    ("soc-gpu", "dl:resnet50-fp32", "mem-util-pct", ("35.2", "5.7"), ("37.6", "0.3")),
    ("soc-dsp", "dl:resnet50-int8", "latency-ms", ("11.0", "0.1"), ("10.5", "0.01")),
    ("soc-dsp", "dl:resnet50-int8", "cpu-util-pct", ("5.2", "2.1"), ("5.7", "0.3")),
    ("soc-dsp", "dl:resnet50-int8", "gpu-util-pct", ("0.6", "0.1"), ("0.6", "0.1")),
    ("soc-dsp", "dl:resnet50-int8", "mem-util-pct", ("32.7", "1.9"), ("37.4", "0.2")),
    ("soc-cpu", "dl:resnet152-fp32", "latency-ms", ("258.3", "0.4"), ("257.8", "1.0")),
    ("soc-cpu", "dl:resnet152-fp32", "cpu-util-pct", ("53.3", "0.1"), ("53.9", "0.3")),
    ("soc-cpu", "dl:resnet152-fp32", "gpu-util-pct", ("0.4", "0.1"), ("0.6", "0.1")),
    ("soc-cpu", "dl:resnet152-fp32", "mem-util-pct", ("34.9", "1.0"), ("40.1", "0.1")),
    ("soc-gpu", "dl:resnet152-fp32", "latency-ms", ("100.9", "0.1"), ("102.8", "0.2")),
    ("soc-gpu", "dl:resnet152-fp32", "cpu-util-pct", ("5.9", "0.5"), ("8.6", "0.1")),
    ("soc-gpu", "dl:resnet152-fp32", "gpu-util-pct", ("81.1", "0.5"), ("78.5", "0.2")),
    ("soc-gpu", "dl:resnet152-fp32", "mem-util-pct", ("35.6", "2.1"), ("39.8", "0.1")),
    ("soc-dsp", "dl:resnet152-int8", "latency-ms", ("21.0", "0.04"), ("20.4", "0.02")),
    ("soc-dsp", "dl:resnet152-int8", "cpu-util-pct", ("6.0", "0.9"), ("7.1", "0.5")),
    ("soc-dsp", "dl:resnet152-int8", "gpu-util-pct", ("0.7", "0.1"), ("0.6", "0.1")),
    ("soc-dsp", "dl:resnet152-int8", "mem-util-pct", ("33.7", "0.8"), ("39.0", "0.2")),
    ("soc-cpu", "dl:yolov5x-fp32", "latency-ms", ("1121.3", "13.7"), ("1113.9", "2.8")),
    ("soc-cpu", "dl:yolov5x-fp32", "cpu-util-pct", ("53.9", "0.2"), ("54.5", "0.1")),
    ("soc-cpu", "dl:yolov5x-fp32", "gpu-util-pct", ("0.5", "0.1"), ("0.6", "0.04")),
    ("soc-cpu", "dl:yolov5x-fp32", "mem-util-pct", ("40.1", "0.6"), ("45.9", "0.1")),
    ("soc-gpu", "dl:yolov5x-fp32", "latency-ms", ("620.6", "1.0"), ("683.7", "4.1")),
    ("soc-gpu", "dl:yolov5x-fp32", "cpu-util-pct", ("5.3", "0.2"), ("7.6", "0.1")),
    ("soc-gpu", "dl:yolov5x-fp32", "gpu-util-pct", ("82.5", "0.1"), ("77.1", "0.4")),
    ("soc-gpu", "dl:yolov5x-fp32", "mem-util-pct", ("39.5", "3.3"), ("44.2", "0.4")),
)


def video_profiles() -> dict:
    out = {}
    for name, content, width, height, fps, entropy, src, tgt in _VIDEO_ROWS:
        out[name] = VideoProfile(
            name=name,
            content=content,
            width=width,
            height=height,
            fps=fps,
            entropy=entropy,
            source_bitrate_kbps=Fraction(src),
            target_bitrate_kbps=Fraction(tgt),
        )
    return out


def dl_model_profiles() -> dict:
    profiles = (
        DlModelProfile("resnet50", "fp32", "image-classification"),
        DlModelProfile("resnet50", "int8", "image-classification"),
        DlModelProfile("resnet152", "fp32", "image-classification"),
        DlModelProfile("resnet152", "int8", "image-classification"),
        DlModelProfile("yolov5x", "fp32", "object-detection"),
    )
    return {p.workload_tag: p for p in profiles}


def _records():
    recs = []

    def add(hardware, engine, workload, metric, value, spread, provenance, citation):
        recs.append(
            CalibrationRecord(
                key=CalibKey(hardware, engine, workload, metric),
                value=Fraction(value),
                spread=Fraction(spread) if spread is not None else None,
                provenance=provenance,
                citation=citation,
            )
        )

    for name, _, *_ in _VIDEO_ROWS:
        cpu, codec, intel, a40 = _STREAM_CAPACITY[name]
        workload = f"video:{name}"
        add("soc-cpu", "software-encode", workload, "max-streams-per-soc", cpu, None,
            "paper-table", f"transcoding capacity measurements, {name}")
        add("soc-codec", "hw-codec", workload, "max-streams-per-soc", codec, None,
            "paper-table", f"transcoding capacity measurements, {name}")
        add("intel-cpu-8core", "software-encode", workload, "max-streams-per-soc", intel, None,
            "paper-figure-approx", f"live throughput chart, {name}, per 8-core partition")
        add("nvidia-a40", "hw-codec", workload, "max-streams-per-soc", a40, None,
            "paper-figure-approx", f"live throughput chart, {name}, per GPU")

        soc_eff, intel_eff, a40_eff = _LIVE_STREAMS_PER_WATT[name]
        add("soc-cpu", "software-encode", workload, "streams-per-watt", soc_eff, None,
            "paper-figure-approx", f"live efficiency chart, {name}, full load")
        add("intel-cpu-8core", "software-encode", workload, "streams-per-watt", intel_eff, None,
            "paper-figure-approx", f"live efficiency chart, {name}, full load")
        add("nvidia-a40", "hw-codec", workload, "streams-per-watt", a40_eff, None,
            "paper-figure-approx", f"live efficiency chart, {name}, full load")

    add("nvidia-a40", "hw-codec", "video:V4-single-stream", "streams-per-watt", "0.018", None,
        "paper-text", "single-stream efficiency note, V4")

    for hardware, engine, workload, value, provenance in _INFERENCE_FRAMES_PER_JOULE:
        add(hardware, engine, workload, "frames-per-joule", value, None, provenance,
            f"inference efficiency comparison, {workload.removeprefix('dl:')}")

    for hardware, engine, workload, value in _INFERENCE_LATENCY_NOTES:
        add(hardware, engine, workload, "latency-ms", value, None, "paper-text",
            f"inference latency note, {workload.removeprefix('dl:')}")

    for hardware, workload, metric, phys, virt in _DEPLOYMENT_ROWS:
        model = workload.removeprefix("dl:")
        add(hardware, "inference", workload, metric, phys[0], phys[1],
            "paper-table", f"deployment comparison, {model}, bare metal")
        add(hardware, "inference-virtualized", workload, metric, virt[0], virt[1],
            "paper-table", f"deployment comparison, {model}, containerized")

    return recs


@lru_cache(maxsize=1)
def default_calibration() -> CalibrationTable:
    """The bundled measurement table; build once, share everywhere."""
    return CalibrationTable(_records())


def default_cost_sheets() -> dict:
    """Monthly-cost inputs for the three reference builds.

    Prices are purchase quotes in USD; watts are measured wall power at
    the 50 percent average utilization the electricity model assumes.
    """
    return {
        "edge-server": CostSheet(
            label="edge-server",
            components=(
                ("Intel CPU", Fraction(2740)),
                ("DRAM", Fraction(3540)),
                ("Disk", Fraction(1220)),
                ("8x NVIDIA A40 GPU", Fraction(35192)),
                ("Others", Fraction(5544)),
            ),
            watts=Fraction(1231),
        ),
        "edge-server-no-gpu": CostSheet(
            label="edge-server-no-gpu",
            components=(
                ("Intel CPU", Fraction(2740)),
                ("DRAM", Fraction(3540)),
                ("Disk", Fraction(1220)),
                ("Others", Fraction(5544)),
            ),
            watts=Fraction(633),
        ),
        "soc-cluster": CostSheet(
            label="soc-cluster",
            components=(
                ("60x SoC", Fraction(24489)),
                ("12x PCB", Fraction(7075)),
                ("Ethernet Switch Board", Fraction(689)),
                ("BMC", Fraction(1923)),
                ("Others", Fraction(2104)),
            ),
            watts=Fraction(589),
        ),
    }


def curve_from_streams_per_watt(streams_per_watt, idle_watts=0, load_unit: str = "streams") -> PowerCurve:
    """Proportional curve whose marginal cost matches a measured TpE."""
    eff = Fraction(streams_per_watt)
    if eff <= 0:
        raise ValueError("efficiency must be positive")
    return linear_curve(idle_watts, 1 / eff, load_unit)


def default_power_curves() -> dict:
    """Fitted load-to-watts curves keyed by (hardware, workload).

    The CPU transcoders measure as near-proportional, so their curves are
    linear with the slope set by full-load efficiency.  The accelerators
    burn a large fixed cost at low stream counts: the A40 curve is flat
    until past 20 streams, anchored so one V4 stream costs 1/0.018 watts
    above idle, and the A100 inference curve is flat until roughly 25
    samples per second.
    """
    curves = {}
    for name, _, *_ in _VIDEO_ROWS:
        workload = f"video:{name}"
        soc_eff, intel_eff, _ = _LIVE_STREAMS_PER_WATT[name]
        curves[("soc-cpu", workload)] = curve_from_streams_per_watt(soc_eff)
        curves[("intel-cpu-8core", workload)] = curve_from_streams_per_watt(intel_eff)
    curves[("nvidia-a40", "video:V4")] = floor_plus_slope_curve(
        idle_watts=30,
        floor_watts=30 + Fraction(500, 9),
        watts_per_load=Fraction(5, 2),
        load_unit="streams",
    )
    curves[("soc-gpu", "dl:resnet50-fp32")] = linear_curve(
        0, Fraction(1, 18), load_unit="samples-per-s"
    )
    curves[("intel-cpu-8core", "dl:resnet50-fp32")] = linear_curve(
        0, 1 / Fraction("2.539"), load_unit="samples-per-s"
    )
    curves[("nvidia-a100", "dl:resnet50-fp32")] = floor_plus_slope_curve(
        idle_watts=50,
        floor_watts=50 + Fraction(571, 360),
        watts_per_load=Fraction(20, 313),
        load_unit="samples-per-s",
    )
    return curves
