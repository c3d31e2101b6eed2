"""Power curves, energy integration, and throughput-per-energy accounting.

A power curve maps offered load on one hardware unit to wall power in
watts.  Three shapes cover the measured hardware:

  linear            idle + slope * load.  Perfectly proportional hardware.
  floor-plus-slope  max(floor, idle + slope * load).  Hardware that burns a
                    fixed overhead until load grows past the crossover;
                    models accelerators whose single-stream power barely
                    differs from their multi-stream power.
  table             piecewise-linear through measured (load, watts) points.

Throughput-per-energy (TpE) divides throughput by power above an idle
baseline, so a unit that merely idles hot is not rewarded for it.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

TPE_UNITS = frozenset({"streams-per-watt", "frames-per-joule", "samples-per-joule"})

LINEAR = "linear"
FLOOR_PLUS_SLOPE = "floor-plus-slope"
TABLE = "table"


class PowerError(Exception):
    pass


class OutOfDomain(PowerError):
    pass


class TooFewSamples(PowerError):
    pass


class ZeroDenominator(PowerError):
    pass


class UnitMismatch(PowerError):
    pass


@dataclass(frozen=True)
class PowerCurve:
    kind: str
    load_unit: str
    idle_watts: Fraction = Fraction(0)
    watts_per_load: Fraction = Fraction(0)
    floor_watts: Fraction = Fraction(0)
    points: tuple = ()


def linear_curve(idle_watts, watts_per_load, load_unit: str = "streams") -> PowerCurve:
    idle = Fraction(idle_watts)
    slope = Fraction(watts_per_load)
    if idle < 0 or slope < 0:
        raise ValueError("idle watts and slope must be nonnegative")
    return PowerCurve(kind=LINEAR, load_unit=load_unit, idle_watts=idle, watts_per_load=slope)


def floor_plus_slope_curve(idle_watts, floor_watts, watts_per_load, load_unit: str = "streams") -> PowerCurve:
    idle = Fraction(idle_watts)
    floor = Fraction(floor_watts)
    slope = Fraction(watts_per_load)
    if idle < 0 or slope < 0:
        raise ValueError("idle watts and slope must be nonnegative")
    if floor < idle:
        raise ValueError("floor must not be below idle")
    return PowerCurve(
        kind=FLOOR_PLUS_SLOPE,
        load_unit=load_unit,
        idle_watts=idle,
        floor_watts=floor,
        watts_per_load=slope,
    )


def table_curve(points, load_unit: str = "streams") -> PowerCurve:
    """Piecewise-linear curve through measured points, sorted by load.

    Loads must be strictly increasing; queries outside [first, last] load
    raise OutOfDomain rather than extrapolate.
    """
    fixed = tuple((Fraction(load), Fraction(watts)) for load, watts in points)
    if len(fixed) < 2:
        raise TooFewSamples("a table curve needs at least two points")
    for (a, wa), (b, wb) in zip(fixed, fixed[1:]):
        if b <= a:
            raise ValueError("table loads must be strictly increasing")
        if wa < 0 or wb < 0:
            raise ValueError("table watts must be nonnegative")
    return PowerCurve(kind=TABLE, load_unit=load_unit, idle_watts=fixed[0][1], points=fixed)


def power_draw(curve: PowerCurve, load) -> Fraction:
    """Wall power at the given load, exact."""
    x = Fraction(load)
    if x < 0:
        raise OutOfDomain(f"load {load} is negative")
    if curve.kind == LINEAR:
        return curve.idle_watts + curve.watts_per_load * x
    if curve.kind == FLOOR_PLUS_SLOPE:
        return max(curve.floor_watts, curve.idle_watts + curve.watts_per_load * x)
    if curve.kind == TABLE:
        pts = curve.points
        if x < pts[0][0] or x > pts[-1][0]:
            raise OutOfDomain(f"load {load} outside measured range [{pts[0][0]}, {pts[-1][0]}]")
        for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
            if x0 <= x <= x1:
                return y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    raise ValueError(f"unknown curve kind {curve.kind!r}")


@dataclass(frozen=True)
class TpEValue:
    value: Fraction
    units: str

    def __post_init__(self):
        if self.units not in TPE_UNITS:
            raise UnitMismatch(f"unknown TpE units {self.units!r}")


def tpe(throughput, power_watts, units: str, baseline_watts=Fraction(0)) -> TpEValue:
    """Throughput per watt above baseline.

    Passing the unit's idle power as baseline charges the workload only
    for the power it adds, which is what makes single-stream efficiency
    comparable across hardware with very different idle draws.
    """
    denom = Fraction(power_watts) - Fraction(baseline_watts)
    if denom <= 0:
        raise ZeroDenominator("power above baseline must be positive")
    return TpEValue(value=Fraction(throughput) / denom, units=units)


def curve_tpe(curve: PowerCurve, load, units: str) -> TpEValue:
    return tpe(load, power_draw(curve, load), units, baseline_watts=curve.idle_watts)


def efficiency_ratio(a: TpEValue, b: TpEValue) -> Fraction:
    if a.units != b.units:
        raise UnitMismatch(f"cannot compare {a.units} against {b.units}")
    if b.value == 0:
        raise ZeroDenominator("reference TpE is zero")
    return a.value / b.value


def proportionality_sweep(curve: PowerCurve, loads, units: str) -> tuple:
    """TpE at each load level: ((load, TpEValue), ...).

    A perfectly proportional curve sweeps flat; hardware with a power
    floor sweeps upward as load amortizes the fixed cost.
    """
    out = []
    for load in loads:
        x = Fraction(load)
        if x <= 0:
            raise OutOfDomain("sweep loads must be positive")
        out.append((x, curve_tpe(curve, x, units)))
    return tuple(out)


@dataclass(frozen=True)
class PowerTrace:
    """Aggregate power samples over virtual time, microsecond stamps."""

    samples: tuple  # ((time_us, watts), ...) strictly increasing times

    def __post_init__(self):
        for (t0, _), (t1, _) in zip(self.samples, self.samples[1:]):
            if t1 <= t0:
                raise ValueError("trace timestamps must be strictly increasing")


def energy_of_trace(trace: PowerTrace) -> Fraction:
    """Joules under the trace by trapezoidal integration.

    Step changes should be recorded as a pre-change sample one microsecond
    before the new level; the trapezoid then matches the exact step
    integral to within the one-microsecond ramp.
    """
    if len(trace.samples) < 2:
        raise TooFewSamples("energy needs at least two samples")
    joules = Fraction(0)
    for (t0, w0), (t1, w1) in zip(trace.samples, trace.samples[1:]):
        joules += Fraction(t1 - t0, 1_000_000) * (Fraction(w0) + Fraction(w1)) / 2
    return joules
