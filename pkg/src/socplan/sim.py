"""Discrete-event placement and energy simulator.

Scenarios describe pools of hardware units, workloads that arrive over
virtual time, and a placement policy.  The engine walks an event heap in
whole microseconds, places or rejects every item the moment it arrives
(there is no queueing: a rejected item is lost), and tracks aggregate
power so a run yields both scheduling metrics and an energy figure.

Determinism is a design requirement: every random draw comes from a
named generator seeded as "{seed}:{purpose}", so the same scenario and
seed produce byte-identical reports on any platform.  The generator is
the standard library Mersenne Twister, whose string seeding is stable
across processes and Python builds.

Engine exclusivity mirrors the measured hardware: one unit runs one
engine at a time, except that the CPU and the hardware codec can co-run
when the policy allows it.  Units that stay idle past the timeout drop
to zero watts and wake instantly on the next placement.
"""

from __future__ import annotations

import heapq
import json
import math
import os
import random
from dataclasses import dataclass
from fractions import Fraction

from .power import PowerTrace, energy_of_trace

SCENARIO_SCHEMA = "scenario/v1"
REPORT_SCHEMA = "report/v1"

POLICIES = frozenset({"consolidate", "spread", "random"})
ARRIVAL_KINDS = frozenset({"batch", "constant-rate", "poisson", "diurnal"})

CPU_CODEC = frozenset({"cpu", "codec"})

MAX_ARRIVALS = 1_000_000


class InvalidScenario(ValueError):
    pass


@dataclass(frozen=True)
class RateTrace:
    """Piecewise-constant arrival rate over one repeating period."""

    period_s: float
    rates_per_s: tuple

    def __post_init__(self):
        if self.period_s <= 0:
            raise InvalidScenario("trace period must be positive")
        if not self.rates_per_s:
            raise InvalidScenario("trace needs at least one bucket")
        if any(r < 0 for r in self.rates_per_s):
            raise InvalidScenario("trace rates must be nonnegative")

    @property
    def bucket_s(self) -> float:
        return self.period_s / len(self.rates_per_s)

    def rate_at(self, t_s: float) -> float:
        bucket = int((t_s % self.period_s) / self.bucket_s) % len(self.rates_per_s)
        return self.rates_per_s[bucket]


def synth_trace(
    peak_per_s: float,
    trough_ratio: float,
    period_s: float = 86400.0,
    buckets: int = 288,
    seed: int = 0,
    jitter: float = 0.02,
) -> RateTrace:
    """Synthetic day-night demand curve.

    The rate swings sinusoidally on a log scale between peak_per_s and
    peak_per_s / trough_ratio, with multiplicative per-bucket jitter.  A
    ratio of exactly 1 yields a perfectly constant trace: jitter is
    suppressed so flat-demand baselines stay flat.
    """
    if peak_per_s <= 0:
        raise InvalidScenario("peak rate must be positive")
    if trough_ratio < 1:
        raise InvalidScenario("trough ratio must be >= 1")
    if buckets < 1:
        raise InvalidScenario("need at least one bucket")
    if not 0 <= jitter < 1:
        raise InvalidScenario("jitter must be within [0, 1)")
    rates = []
    for b in range(buckets):
        depth = (1 - math.cos(2 * math.pi * b / buckets)) / 2
        rate = peak_per_s * trough_ratio ** (-depth)
        if trough_ratio != 1 and jitter > 0:
            rng = random.Random(f"{seed}:{b}")
            rate *= 1 + rng.uniform(-jitter, jitter)
        rates.append(rate)
    return RateTrace(period_s=float(period_s), rates_per_s=tuple(rates))


@dataclass(frozen=True)
class Arrivals:
    kind: str
    count: int = 0
    rate_per_s: float = 0.0
    start_ms: Fraction = Fraction(0)
    trace: RateTrace | None = None

    def __post_init__(self):
        if self.kind not in ARRIVAL_KINDS:
            raise InvalidScenario(f"unknown arrival kind {self.kind!r}")
        if self.start_ms < 0:
            raise InvalidScenario("arrivals cannot start before time zero")
        if self.kind == "batch" and self.count < 0:
            raise InvalidScenario("batch count must be nonnegative")
        if self.kind in ("constant-rate", "poisson") and self.rate_per_s <= 0:
            raise InvalidScenario(f"{self.kind} arrivals need a positive rate")
        if self.kind == "diurnal" and self.trace is None:
            raise InvalidScenario("diurnal arrivals need a rate trace")


@dataclass(frozen=True)
class UnitPool:
    name: str
    count: int
    engines: tuple

    def __post_init__(self):
        if not self.name:
            raise InvalidScenario("pool name must be non-empty")
        if self.count < 1:
            raise InvalidScenario(f"pool {self.name!r} needs at least one unit")
        if not self.engines:
            raise InvalidScenario(f"pool {self.name!r} needs at least one engine")


@dataclass(frozen=True)
class Workload:
    name: str
    pool: str
    engine: str
    unit_capacity: int
    arrivals: Arrivals
    service_ms: Fraction | None = None
    watts_per_item: Fraction = Fraction(0)

    def __post_init__(self):
        if not self.name:
            raise InvalidScenario("workload name must be non-empty")
        if self.unit_capacity < 1:
            raise InvalidScenario(f"workload {self.name!r} needs unit capacity >= 1")
        if self.service_ms is not None and self.service_ms <= 0:
            raise InvalidScenario(f"workload {self.name!r} needs a positive service time")
        if self.watts_per_item < 0:
            raise InvalidScenario(f"workload {self.name!r} has negative per-item power")


@dataclass(frozen=True)
class Policy:
    kind: str = "consolidate"
    allow_cpu_codec_corun: bool = False

    def __post_init__(self):
        if self.kind not in POLICIES:
            raise InvalidScenario(f"unknown policy {self.kind!r}")


@dataclass(frozen=True)
class Scenario:
    name: str
    horizon_ms: Fraction
    pools: tuple
    workloads: tuple
    policy: Policy = Policy()
    idle_timeout_ms: Fraction | None = Fraction(1000)
    idle_watts: Fraction = Fraction(0)

    def __post_init__(self):
        if self.horizon_ms <= 0:
            raise InvalidScenario("horizon must be positive")
        if not self.pools:
            raise InvalidScenario("scenario needs at least one pool")
        if self.idle_timeout_ms is not None and self.idle_timeout_ms < 0:
            raise InvalidScenario("idle timeout must be nonnegative")
        if self.idle_watts < 0:
            raise InvalidScenario("idle watts must be nonnegative")
        names = [p.name for p in self.pools]
        if len(set(names)) != len(names):
            raise InvalidScenario("pool names must be unique")
        wnames = [w.name for w in self.workloads]
        if len(set(wnames)) != len(wnames):
            raise InvalidScenario("workload names must be unique")
        pools = {p.name: p for p in self.pools}
        for w in self.workloads:
            pool = pools.get(w.pool)
            if pool is None:
                raise InvalidScenario(f"workload {w.name!r} references unknown pool {w.pool!r}")
            if w.engine not in pool.engines:
                raise InvalidScenario(
                    f"workload {w.name!r} wants engine {w.engine!r}, "
                    f"pool {w.pool!r} offers {sorted(pool.engines)}"
                )
            start_us = _to_us(w.arrivals.start_ms)
            if start_us >= _to_us(self.horizon_ms):
                raise InvalidScenario(f"workload {w.name!r} starts at or after the horizon")


def soc_cluster_pool(count: int = 60) -> UnitPool:
    return UnitPool(name="soc", count=count, engines=("cpu", "gpu", "dsp", "codec"))


def _to_us(ms) -> int:
    return int(Fraction(ms) * 1000)


@dataclass(frozen=True)
class WorkloadStats:
    arrived: int
    placed: int
    rejected: int
    completed: int
    active_at_end: int


@dataclass(frozen=True)
class MetricsReport:
    scenario: str
    seed: int
    horizon_us: int
    workloads: tuple  # ((name, WorkloadStats), ...) in scenario order
    peak_busy_units: int
    busy_units_end: int
    occupancy_end: tuple  # ((unit, items), ...) nonzero only, unit order
    energy_joules: Fraction
    trace: PowerTrace

    def to_dict(self) -> dict:
        return {
            "schema": REPORT_SCHEMA,
            "scenario": self.scenario,
            "seed": self.seed,
            "horizon_us": self.horizon_us,
            "workloads": {
                name: {
                    "arrived": s.arrived,
                    "placed": s.placed,
                    "rejected": s.rejected,
                    "completed": s.completed,
                    "active_at_end": s.active_at_end,
                }
                for name, s in self.workloads
            },
            "peak_busy_units": self.peak_busy_units,
            "busy_units_end": self.busy_units_end,
            "occupancy_end": {unit: items for unit, items in self.occupancy_end},
            "energy_joules": str(self.energy_joules),
            "trace": [[t, str(w)] for t, w in self.trace.samples],
        }

    @staticmethod
    def from_dict(data: dict) -> "MetricsReport":
        if data.get("schema") != REPORT_SCHEMA:
            raise ValueError(f"expected schema {REPORT_SCHEMA!r}, got {data.get('schema')!r}")
        return MetricsReport(
            scenario=data["scenario"],
            seed=data["seed"],
            horizon_us=data["horizon_us"],
            workloads=tuple(
                (name, WorkloadStats(**stats)) for name, stats in data["workloads"].items()
            ),
            peak_busy_units=data["peak_busy_units"],
            busy_units_end=data["busy_units_end"],
            occupancy_end=tuple(data["occupancy_end"].items()),
            energy_joules=Fraction(data["energy_joules"]),
            trace=PowerTrace(tuple((t, Fraction(w)) for t, w in data["trace"])),
        )


def canonical_json(report: MetricsReport) -> str:
    """Stable byte representation: equal reports serialize identically."""
    return json.dumps(report.to_dict(), sort_keys=True, separators=(",", ":"))


def check_conservation(report: MetricsReport) -> bool:
    """Every arrival is accounted for exactly once, nothing invented."""
    for _, s in report.workloads:
        if s.arrived != s.placed + s.rejected:
            return False
        if s.placed != s.completed + s.active_at_end:
            return False
        if min(s.arrived, s.placed, s.rejected, s.completed, s.active_at_end) < 0:
            return False
    return True


class _Unit:
    __slots__ = ("name", "engines", "counts", "watts", "awake", "idle_marker")

    def __init__(self, name, engines):
        self.name = name
        self.engines = frozenset(engines)
        self.counts = {}  # workload name -> active items
        self.watts = Fraction(0)  # per-item power, excludes idle
        self.awake = True
        self.idle_marker = 0  # bumps on every activity change

    @property
    def active(self) -> int:
        return sum(self.counts.values())

    def active_engines(self, engine_of) -> set:
        return {engine_of[w] for w, c in self.counts.items() if c > 0}


def _engine_compatible(unit: _Unit, engine: str, engine_of, corun: bool) -> bool:
    active = unit.active_engines(engine_of)
    if not active or active == {engine}:
        return True
    if corun and active | {engine} <= CPU_CODEC:
        return True
    return False


def _feasible_units(units, workload: Workload, engine_of, policy: Policy):
    out = []
    for unit in units:
        if unit.counts.get(workload.name, 0) >= workload.unit_capacity:
            continue
        if not _engine_compatible(unit, workload.engine, engine_of, policy.allow_cpu_codec_corun):
            continue
        out.append(unit)
    return out


def place(units, workload: Workload, engine_of, policy: Policy, rng: random.Random):
    """Pick the unit for one item, or None when every unit is infeasible.

    consolidate takes the first feasible unit in pool order, so load
    packs densely from the low ids; spread takes the least-loaded unit;
    random picks uniformly among the feasible ones.
    """
    feasible = _feasible_units(units, workload, engine_of, policy)
    if not feasible:
        return None
    if policy.kind == "consolidate":
        return feasible[0]
    if policy.kind == "spread":
        return min(feasible, key=lambda u: u.active)
    return rng.choice(feasible)


def _gen_arrivals(workload: Workload, horizon_us: int, seed) -> list:
    spec = workload.arrivals
    start_us = _to_us(spec.start_ms)
    times = []
    if spec.kind == "batch":
        times = [start_us] * spec.count
    elif spec.kind == "constant-rate":
        gap_us = Fraction(1_000_000) / Fraction(str(spec.rate_per_s))
        k = 0
        while True:
            t = start_us + int(k * gap_us)
            if t >= horizon_us:
                break
            times.append(t)
            k += 1
            if len(times) > MAX_ARRIVALS:
                raise InvalidScenario(f"workload {workload.name!r} generates too many arrivals")
    elif spec.kind == "poisson":
        rng = random.Random(f"{seed}:arrivals:{workload.name}")
        t_s = start_us / 1_000_000
        horizon_s = horizon_us / 1_000_000
        while True:
            t_s += rng.expovariate(spec.rate_per_s)
            if t_s >= horizon_s:
                break
            times.append(int(t_s * 1_000_000))
            if len(times) > MAX_ARRIVALS:
                raise InvalidScenario(f"workload {workload.name!r} generates too many arrivals")
    else:  # diurnal
        rng = random.Random(f"{seed}:arrivals:{workload.name}")
        trace = spec.trace
        t_s = start_us / 1_000_000
        horizon_s = horizon_us / 1_000_000
        bucket_s = trace.bucket_s
        while t_s < horizon_s:
            rate = trace.rate_at(t_s)
            bucket_end = (math.floor(t_s / bucket_s) + 1) * bucket_s
            if rate <= 0:
                t_s = bucket_end
                continue
            gap = rng.expovariate(rate)
            if t_s + gap >= bucket_end:
                # no arrival before the bucket boundary; restart there,
                # which is exact for a memoryless process
                t_s = bucket_end
                continue
            t_s += gap
            if t_s >= horizon_s:
                break
            times.append(int(t_s * 1_000_000))
            if len(times) > MAX_ARRIVALS:
                raise InvalidScenario(f"workload {workload.name!r} generates too many arrivals")
    return times


# event kinds, in processing priority at equal timestamps
_EV_DEPART = 0
_EV_ARRIVE = 1
_EV_SLEEP = 2


def run(scenario: Scenario, seed: int = 0) -> MetricsReport:
    horizon_us = _to_us(scenario.horizon_ms)
    timeout_us = None if scenario.idle_timeout_ms is None else _to_us(scenario.idle_timeout_ms)

    units = []
    pool_units = {}
    for pool in scenario.pools:
        members = [_Unit(f"{pool.name}:{i}", pool.engines) for i in range(pool.count)]
        pool_units[pool.name] = members
        units.extend(members)
    by_workload = {w.name: w for w in scenario.workloads}
    engine_of = {w.name: w.engine for w in scenario.workloads}

    stats = {
        w.name: {"arrived": 0, "placed": 0, "rejected": 0, "completed": 0}
        for w in scenario.workloads
    }

    heap = []
    seq = 0
    for w in scenario.workloads:
        for t in _gen_arrivals(w, horizon_us, seed):
            heapq.heappush(heap, (t, _EV_ARRIVE, seq, w.name, None))
            seq += 1

    place_rng = random.Random(f"{seed}:place")

    idle_total = scenario.idle_watts * len(units)
    total_watts = idle_total  # all units start awake and idle
    steps = []  # (time_us, watts after every event at that time)
    peak_busy = 0

    def busy_count():
        return sum(1 for u in units if u.active > 0)

    def mark_idle(unit: _Unit, now: int):
        nonlocal seq
        unit.idle_marker += 1
        if timeout_us is not None and scenario.idle_watts > 0:
            heapq.heappush(heap, (now + timeout_us, _EV_SLEEP, seq, unit.name, unit.idle_marker))
            seq += 1

    unit_by_name = {u.name: u for u in units}

    # every unit starts awake and idle; give each its first sleep check
    for unit in units:
        mark_idle(unit, 0)

    while heap:
        now = heap[0][0]
        if now > horizon_us:
            break
        group = []
        while heap and heap[0][0] == now:
            group.append(heapq.heappop(heap))
        group.sort(key=lambda ev: (ev[1], ev[2]))
        for _, kind, _, ref, payload in group:
            if kind == _EV_DEPART:
                unit = unit_by_name[ref]
                wname = payload
                unit.counts[wname] -= 1
                w = by_workload[wname]
                unit.watts -= w.watts_per_item
                total_watts -= w.watts_per_item
                stats[wname]["completed"] += 1
                if unit.active == 0:
                    mark_idle(unit, now)
            elif kind == _EV_ARRIVE:
                w = by_workload[ref]
                stats[ref]["arrived"] += 1
                unit = place(pool_units[w.pool], w, engine_of, scenario.policy, place_rng)
                if unit is None:
                    stats[ref]["rejected"] += 1
                    continue
                stats[ref]["placed"] += 1
                unit.counts[ref] = unit.counts.get(ref, 0) + 1
                unit.idle_marker += 1
                if not unit.awake:
                    unit.awake = True
                    total_watts += scenario.idle_watts
                unit.watts += w.watts_per_item
                total_watts += w.watts_per_item
                if w.service_ms is not None:
                    depart = now + _to_us(w.service_ms)
                    if depart <= horizon_us:
                        heapq.heappush(heap, (depart, _EV_DEPART, seq, unit.name, ref))
                        seq += 1
            else:  # _EV_SLEEP
                unit = unit_by_name[ref]
                if unit.awake and unit.active == 0 and unit.idle_marker == payload:
                    unit.awake = False
                    total_watts -= scenario.idle_watts
        peak_busy = max(peak_busy, busy_count())
        if not steps or steps[-1][1] != total_watts:
            steps.append((now, total_watts))

    # render steps into a trapezoid-friendly trace: a pre-change sample
    # one microsecond before each step keeps the integral exact
    samples = []
    if not steps or steps[0][0] > 0:
        samples.append((0, idle_total))
    for t, w in steps:
        if samples and t - 1 > samples[-1][0]:
            samples.append((t - 1, samples[-1][1]))
        if samples and t == samples[-1][0]:
            samples[-1] = (t, w)
        else:
            samples.append((t, w))
    if samples[-1][0] < horizon_us:
        samples.append((horizon_us, samples[-1][1]))

    trace = PowerTrace(tuple(samples))
    active_end = {
        w.name: sum(u.counts.get(w.name, 0) for u in units) for w in scenario.workloads
    }
    workload_stats = tuple(
        (
            w.name,
            WorkloadStats(
                arrived=stats[w.name]["arrived"],
                placed=stats[w.name]["placed"],
                rejected=stats[w.name]["rejected"],
                completed=stats[w.name]["completed"],
                active_at_end=active_end[w.name],
            ),
        )
        for w in scenario.workloads
    )
    occupancy = tuple((u.name, u.active) for u in units if u.active > 0)
    return MetricsReport(
        scenario=scenario.name,
        seed=seed,
        horizon_us=horizon_us,
        workloads=workload_stats,
        peak_busy_units=peak_busy,
        busy_units_end=busy_count(),
        occupancy_end=occupancy,
        energy_joules=energy_of_trace(trace),
        trace=trace,
    )


def _fraction_field(data, key, default):
    if key not in data:
        return default
    return Fraction(str(data[key]))


def load_scenario(source) -> Scenario:
    """Build a Scenario from a JSON object or a path to one.

    Numbers may be JSON numbers or decimal strings; strings survive the
    round trip exactly and are preferred for power values.
    """
    if isinstance(source, (str, os.PathLike)):
        with open(source, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    else:
        data = dict(source)
    if data.get("schema") != SCENARIO_SCHEMA:
        raise InvalidScenario(
            f"expected schema {SCENARIO_SCHEMA!r}, got {data.get('schema')!r}"
        )
    try:
        pools = tuple(
            UnitPool(name=p["name"], count=int(p["count"]), engines=tuple(p["engines"]))
            for p in data["pools"]
        )
        workloads = []
        for w in data["workloads"]:
            arr = w["arrivals"]
            trace = None
            if "trace" in arr:
                trace = RateTrace(
                    period_s=float(arr["trace"]["period_s"]),
                    rates_per_s=tuple(float(r) for r in arr["trace"]["rates_per_s"]),
                )
            arrivals = Arrivals(
                kind=arr["kind"],
                count=int(arr.get("count", 0)),
                rate_per_s=float(arr.get("rate_per_s", 0.0)),
                start_ms=_fraction_field(arr, "start_ms", Fraction(0)),
                trace=trace,
            )
            service = w.get("service_ms")
            workloads.append(
                Workload(
                    name=w["name"],
                    pool=w["pool"],
                    engine=w["engine"],
                    unit_capacity=int(w["unit_capacity"]),
                    arrivals=arrivals,
                    service_ms=None if service is None else Fraction(str(service)),
                    watts_per_item=_fraction_field(w, "watts_per_item", Fraction(0)),
                )
            )
        policy_data = data.get("policy", {})
        scenario = Scenario(
            name=data["name"],
            horizon_ms=Fraction(str(data["horizon_ms"])),
            pools=pools,
            workloads=tuple(workloads),
            policy=Policy(
                kind=policy_data.get("kind", "consolidate"),
                allow_cpu_codec_corun=bool(policy_data.get("allow_cpu_codec_corun", False)),
            ),
            idle_timeout_ms=(
                None
                if data.get("idle_timeout_ms", 1000) is None
                else Fraction(str(data.get("idle_timeout_ms", 1000)))
            ),
            idle_watts=_fraction_field(data, "idle_watts", Fraction(0)),
        )
    except KeyError as exc:
        raise InvalidScenario(f"scenario missing field {exc.args[0]!r}") from None
    return scenario


def example_scenario() -> dict:
    """A small, valid scenario document for the file format."""
    return {
        "schema": SCENARIO_SCHEMA,
        "name": "cluster-live-streams",
        "horizon_ms": 60000,
        "idle_timeout_ms": 1000,
        "idle_watts": "0.5",
        "policy": {"kind": "consolidate", "allow_cpu_codec_corun": False},
        "pools": [{"name": "soc", "count": 60, "engines": ["cpu", "gpu", "dsp", "codec"]}],
        "workloads": [
            {
                "name": "v1-software",
                "pool": "soc",
                "engine": "cpu",
                "unit_capacity": 13,
                "service_ms": 30000,
                "watts_per_item": "0.9434",
                "arrivals": {"kind": "poisson", "rate_per_s": 5.0},
            },
            {
                "name": "v1-codec",
                "pool": "soc",
                "engine": "codec",
                "unit_capacity": 16,
                "service_ms": 30000,
                "watts_per_item": "0.4",
                "arrivals": {"kind": "constant-rate", "rate_per_s": 2.0, "start_ms": 500},
            },
        ],
    }
