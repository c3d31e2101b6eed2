"""Command-line front end.

One executable, one verb per analysis:

    socplan net        peak bandwidth per video and the binding link
    socplan tco        monthly cost of ownership per build
    socplan tpc        live streams per monthly dollar, builds x videos
    socplan collab     multi-SoC inference latency breakdown
    socplan simulate   run a scenario file through the event simulator
    socplan sweep      efficiency across load levels for a power curve
    socplan defaults   dump the bundled dataset

Exit codes: 0 on success, 1 on usage errors, 2 on bad input data.
Machine formats carry a schema field; numbers in JSON output are exact
decimal or rational strings, while the table format rounds for reading.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction

from . import collab as collab_mod
from .calibration import (
    CalibKey,
    CalibrationError,
    format_decimal,
    load_calibration,
    lookup,
    serialize_calibration,
)
from .defaults import (
    default_calibration,
    default_cost_sheets,
    default_power_curves,
    video_profiles,
)
from .network import survey
from .power import PowerError, power_draw, proportionality_sweep
from .sim import InvalidScenario, example_scenario, load_scenario, run
from .tco import CostError, load_cost_sheet, monthly_tco, tpc
from .topology import InvalidTopology, default_cluster, default_edge_server, load_topology

PAYLOAD_SCHEMA = "socplan/v1"

_DATA_ERRORS = (
    CalibrationError,
    CostError,
    PowerError,
    InvalidScenario,
    InvalidTopology,
    collab_mod.Infeasible,
    OSError,
    ValueError,
    KeyError,
)


class _Parser(argparse.ArgumentParser):
    """argparse with usage failures mapped to exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _exact(value) -> str:
    """Exact string form of a number: decimal when finite, else p/q."""
    fr = Fraction(value)
    try:
        return format_decimal(fr)
    except ValueError:
        return str(fr)


def _round_str(value, digits: int) -> str:
    return f"{float(value):.{digits}f}"


def _format_rows(columns, rows, payload, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if fmt == "csv":
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(columns)
        writer.writerows(rows)
        return out.getvalue()
    widths = [len(c) for c in columns]
    for row in rows:
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], len(str(cell)))
    lines = ["  ".join(str(c).ljust(widths[i]) for i, c in enumerate(columns)).rstrip()]
    lines.append("  ".join("-" * w for w in widths))
    for row in rows:
        lines.append("  ".join(str(c).ljust(widths[i]) for i, c in enumerate(row)).rstrip())
    return "\n".join(lines) + "\n"


def _calib(args):
    if args.calib:
        return load_calibration(args.calib)
    return default_calibration()


def cmd_net(args) -> str:
    topo = load_topology(args.topology) if args.topology else default_cluster()
    table = _calib(args)
    profiles = video_profiles()
    if args.video:
        missing = [v for v in args.video if v not in profiles]
        if missing:
            raise ValueError(f"unknown videos: {missing}; bundled: {sorted(profiles)}")
        selected = [profiles[v] for v in args.video]
    else:
        selected = [profiles[name] for name in sorted(profiles)]
    results = survey(topo, selected, table)

    columns = (
        "video", "streams-per-pcb", "pcb-mbps", "pcb-capacity", "pcb-pct",
        "server-mbps", "esb-capacity", "server-pct", "bottleneck",
    )
    rows = []
    payload_rows = []
    for name in (p.name for p in selected):
        pcb, server, verdict = results[name]
        rows.append((
            name,
            _round_str(pcb.streams, 0),
            str(round(pcb.used_mbps)),
            str(round(pcb.capacity_mbps)),
            _round_str(pcb.fraction * 100, 1),
            str(round(server.used_mbps)),
            str(round(server.capacity_mbps)),
            _round_str(server.fraction * 100, 1),
            verdict,
        ))
        payload_rows.append({
            "video": name,
            "streams_per_pcb": _exact(pcb.streams),
            "pcb_used_mbps": _exact(pcb.used_mbps),
            "pcb_capacity_mbps": _exact(pcb.capacity_mbps),
            "server_used_mbps": _exact(server.used_mbps),
            "esb_capacity_mbps": _exact(server.capacity_mbps),
            "bottleneck": verdict,
        })
    payload = {"schema": PAYLOAD_SCHEMA, "command": "net", "rows": payload_rows}
    return _format_rows(columns, rows, payload, args.format)


def cmd_tco(args) -> str:
    sheets = default_cost_sheets()
    if args.sheet_file:
        sheet = load_cost_sheet(args.sheet_file)
        sheets[sheet.label] = sheet
    if args.sheet:
        if args.sheet not in sheets:
            raise ValueError(f"unknown cost sheet {args.sheet!r}; have {sorted(sheets)}")
        sheets = {args.sheet: sheets[args.sheet]}

    columns = ("build", "capex-usd", "monthly-capex", "energy-kwh",
               "electricity-usd", "pue-overhead-usd", "monthly-total")
    rows = []
    payload_rows = []
    for label in sheets:
        sheet = sheets[label]
        t = monthly_tco(sheet)
        rows.append((
            label,
            str(round(sheet.capex_usd)),
            str(round(t.amortized_capex_usd)),
            _round_str(t.energy_kwh, 1),
            str(round(t.electricity_usd)),
            str(round(t.pue_overhead_usd)),
            str(round(t.total_usd)),
        ))
        payload_rows.append({
            "build": label,
            "components": {name: _exact(usd) for name, usd in sheet.components},
            "capex_usd": _exact(sheet.capex_usd),
            "amortized_capex_usd": _exact(t.amortized_capex_usd),
            "energy_kwh": _exact(t.energy_kwh),
            "electricity_usd": _exact(t.electricity_usd),
            "pue_overhead_usd": _exact(t.pue_overhead_usd),
            "total_usd": _exact(t.total_usd),
        })
    payload = {"schema": PAYLOAD_SCHEMA, "command": "tco", "rows": payload_rows}
    return _format_rows(columns, rows, payload, args.format)


def _tpc_platforms():
    topo = default_cluster()
    server = default_edge_server()
    return (
        ("edge-server-cpu", "intel-cpu-8core", "software-encode",
         server.cpu_partitions, "edge-server"),
        ("edge-server-a40", "nvidia-a40", "hw-codec", server.gpus, "edge-server"),
        ("edge-server-no-gpu-cpu", "intel-cpu-8core", "software-encode",
         server.cpu_partitions, "edge-server-no-gpu"),
        ("soc-cluster-cpu", "soc-cpu", "software-encode", topo.soc_count, "soc-cluster"),
    )


def cmd_tpc(args) -> str:
    table = _calib(args)
    sheets = default_cost_sheets()
    tcos = {label: monthly_tco(sheet) for label, sheet in sheets.items()}
    videos = sorted(video_profiles())

    columns = ("platform", "units", "build") + tuple(videos)
    rows = []
    payload_rows = []
    for label, hardware, engine, units, build in _tpc_platforms():
        cells = []
        exact_cells = {}
        for video in videos:
            capacity = lookup(table, CalibKey(hardware, engine, f"video:{video}",
                                              "max-streams-per-soc")).value
            value = tpc(units * capacity, tcos[build], "streams-per-usd")
            cells.append(_round_str(value.value, 3))
            exact_cells[video] = _exact(value.value)
        rows.append((label, str(units), build) + tuple(cells))
        payload_rows.append({
            "platform": label,
            "hardware": hardware,
            "units": units,
            "build": build,
            "streams_per_usd": exact_cells,
        })
    payload = {"schema": PAYLOAD_SCHEMA, "command": "tpc", "rows": payload_rows}
    return _format_rows(columns, rows, payload, args.format)


def cmd_collab(args) -> str:
    if args.t1 is not None or args.tn is not None:
        if args.t1 is None or args.tn is None:
            raise ValueError("custom fits need both --t1 and --tn")
        model = collab_mod.calibrate_from_shares(
            t1_ms=Fraction(str(args.t1)),
            tn_ms=Fraction(str(args.tn)),
            n=args.fit_socs,
            serial_comm_share=Fraction(str(args.serial_share)),
            pipelined_comm_share=Fraction(str(args.pipelined_share)),
        )
    else:
        model = collab_mod.resnet50_width_split()
    n = args.socs

    columns = ("mode", "socs", "compute-ms", "comm-ms", "exposed-ms",
               "total-ms", "comm-share-pct", "speedup")
    rows = []
    payload_modes = {}
    for mode, pipelined in (("serial", False), ("pipelined", True)):
        b = collab_mod.total_latency(model, n, pipelined=pipelined)
        s = collab_mod.speedup(model, n, pipelined=pipelined)
        rows.append((
            mode, str(n),
            _round_str(b.compute_ms, 1), _round_str(b.comm_ms, 1),
            _round_str(b.exposed_comm_ms, 1), _round_str(b.total_ms, 1),
            _round_str(b.comm_share * 100, 1), _round_str(s, 2),
        ))
        payload_modes[mode] = {
            "compute_ms": _exact(b.compute_ms),
            "comm_ms": _exact(b.comm_ms),
            "exposed_comm_ms": _exact(b.exposed_comm_ms),
            "total_ms": _exact(b.total_ms),
            "comm_share": _exact(b.comm_share),
            "speedup": _exact(s),
        }
    payload = {
        "schema": PAYLOAD_SCHEMA,
        "command": "collab",
        "socs": n,
        "serial_fraction": _exact(model.serial_fraction),
        "overlap_fraction": _exact(model.overlap_fraction),
        "modes": payload_modes,
    }
    return _format_rows(columns, rows, payload, args.format)


def cmd_simulate(args) -> str:
    scenario = load_scenario(args.scenario)
    report = run(scenario, seed=args.seed)
    if args.format == "json":
        return json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n"

    columns = ("workload", "arrived", "placed", "rejected", "completed", "active-at-end")
    rows = [
        (name, s.arrived, s.placed, s.rejected, s.completed, s.active_at_end)
        for name, s in report.workloads
    ]
    body = _format_rows(columns, rows, None, args.format)
    if args.format == "csv":
        return body
    summary = (
        f"scenario: {report.scenario}  seed: {report.seed}\n"
        f"peak busy units: {report.peak_busy_units}  "
        f"busy at end: {report.busy_units_end}\n"
        f"energy: {_round_str(report.energy_joules, 3)} J\n"
    )
    return body + summary


def _parse_loads(text: str):
    if ":" in text:
        parts = text.split(":")
        if len(parts) not in (2, 3):
            raise ValueError(f"bad load range {text!r}; use start:stop[:step]")
        start, stop = Fraction(parts[0]), Fraction(parts[1])
        step = Fraction(parts[2]) if len(parts) == 3 else Fraction(1)
        if step <= 0 or stop < start:
            raise ValueError(f"bad load range {text!r}")
        loads = []
        x = start
        while x <= stop:
            loads.append(x)
            x += step
        return loads
    return [Fraction(part) for part in text.split(",") if part]


def cmd_sweep(args) -> str:
    curves = default_power_curves()
    key = (args.hardware, args.workload)
    if key not in curves:
        known = ", ".join(f"{h}/{w}" for h, w in sorted(curves))
        raise ValueError(f"no bundled power curve for {args.hardware}/{args.workload}; have: {known}")
    curve = curves[key]
    loads = _parse_loads(args.loads)
    points = proportionality_sweep(curve, loads, args.units)

    columns = ("load", "watts", args.units)
    rows = []
    payload_rows = []
    for load, value in points:
        watts = power_draw(curve, load)
        rows.append((_round_str(load, 1), _round_str(watts, 1), _round_str(value.value, 4)))
        payload_rows.append({
            "load": _exact(load),
            "watts": _exact(watts),
            "tpe": _exact(value.value),
            "units": value.units,
        })
    payload = {
        "schema": PAYLOAD_SCHEMA,
        "command": "sweep",
        "hardware": args.hardware,
        "workload": args.workload,
        "rows": payload_rows,
    }
    return _format_rows(columns, rows, payload, args.format)


def cmd_defaults(args) -> str:
    what = args.what
    if what == "calibration":
        return serialize_calibration(_calib(args))
    if what == "scenario":
        return json.dumps(example_scenario(), indent=2) + "\n"
    if what == "videos":
        columns = ("video", "content", "resolution", "fps", "entropy",
                   "source-kbps", "target-kbps")
        profiles = video_profiles()
        rows = []
        payload_rows = []
        for name in sorted(profiles):
            p = profiles[name]
            rows.append((name, p.content, f"{p.width}x{p.height}", p.fps, p.entropy,
                         _exact(p.source_bitrate_kbps), _exact(p.target_bitrate_kbps)))
            payload_rows.append({
                "video": name,
                "content": p.content,
                "width": p.width,
                "height": p.height,
                "fps": p.fps,
                "entropy": p.entropy,
                "source_kbps": _exact(p.source_bitrate_kbps),
                "target_kbps": _exact(p.target_bitrate_kbps),
            })
        payload = {"schema": PAYLOAD_SCHEMA, "command": "defaults", "videos": payload_rows}
        return _format_rows(columns, rows, payload, args.format)
    if what == "costs":
        ns = argparse.Namespace(sheet=None, sheet_file=None, format=args.format)
        return cmd_tco(ns)
    # curves
    columns = ("hardware", "workload", "kind", "load-unit", "idle-w", "floor-w", "w-per-load")
    curves = default_power_curves()
    rows = []
    payload_rows = []
    for (hardware, workload) in sorted(curves):
        c = curves[(hardware, workload)]
        rows.append((hardware, workload, c.kind, c.load_unit,
                     _round_str(c.idle_watts, 1), _round_str(c.floor_watts, 1),
                     _round_str(c.watts_per_load, 4)))
        payload_rows.append({
            "hardware": hardware,
            "workload": workload,
            "kind": c.kind,
            "load_unit": c.load_unit,
            "idle_watts": _exact(c.idle_watts),
            "floor_watts": _exact(c.floor_watts),
            "watts_per_load": _exact(c.watts_per_load),
        })
    payload = {"schema": PAYLOAD_SCHEMA, "command": "defaults", "curves": payload_rows}
    return _format_rows(columns, rows, payload, args.format)


def build_parser() -> _Parser:
    # shared flags accepted both before and after the verb; SUPPRESS keeps
    # the subparser from clobbering a value given before the verb
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--calib", metavar="CSV", default=argparse.SUPPRESS,
                        help="calibration table to use instead of the bundled one")
    shared.add_argument("--format", choices=("table", "csv", "json"),
                        default=argparse.SUPPRESS)
    shared.add_argument("--out", metavar="FILE", default=argparse.SUPPRESS,
                        help="write output to FILE instead of stdout")

    parser = _Parser(prog="socplan", description=__doc__.splitlines()[0],
                     parents=[shared])
    sub = parser.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    def add_verb(name, help_text):
        return sub.add_parser(name, help=help_text, parents=[shared])

    p = add_verb("net", "peak bandwidth per video and the binding link")
    p.add_argument("--video", action="append", metavar="NAME",
                   help="restrict to one video; repeatable")
    p.add_argument("--topology", metavar="JSON", default=None)
    p.set_defaults(func=cmd_net)

    p = add_verb("tco", "monthly cost of ownership per build")
    p.add_argument("--sheet", metavar="LABEL", default=None)
    p.add_argument("--sheet-file", metavar="JSON", default=None)
    p.set_defaults(func=cmd_tco)

    p = add_verb("tpc", "live streams per monthly dollar")
    p.set_defaults(func=cmd_tpc)

    p = add_verb("collab", "multi-SoC inference latency")
    p.add_argument("--socs", type=int, default=5)
    p.add_argument("--t1", default=None, help="single-SoC latency in ms")
    p.add_argument("--tn", default=None, help="latency at --fit-socs SoCs, ms")
    p.add_argument("--fit-socs", type=int, default=5)
    p.add_argument("--serial-share", default="0.415")
    p.add_argument("--pipelined-share", default="0.229")
    p.set_defaults(func=cmd_collab)

    p = add_verb("simulate", "run a scenario file")
    p.add_argument("scenario", metavar="SCENARIO_JSON")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_simulate)

    p = add_verb("sweep", "efficiency across load levels")
    p.add_argument("--hardware", required=True)
    p.add_argument("--workload", required=True)
    p.add_argument("--loads", default="1:20", help="start:stop[:step] or comma list")
    p.add_argument("--units", default="streams-per-watt")
    p.set_defaults(func=cmd_sweep)

    p = add_verb("defaults", "dump the bundled dataset")
    p.add_argument("--what", choices=("calibration", "costs", "videos", "curves", "scenario"),
                   default="calibration")
    p.set_defaults(func=cmd_defaults)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args.calib = getattr(args, "calib", None)
    args.format = getattr(args, "format", "table")
    args.out = getattr(args, "out", None)
    try:
        text = args.func(args)
    except _DATA_ERRORS as exc:
        detail = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"socplan: error: {detail}", file=sys.stderr)
        return 2
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
