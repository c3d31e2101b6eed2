"""Monthly cost of ownership and throughput-per-cost accounting.

Capital cost is amortized linearly over the machine lifetime.  Operating
cost is electricity at an average utilization, multiplied through the
facility PUE: the overhead row reports the non-IT share, base * (PUE - 1),
so base plus overhead equals facility-level energy cost.  All arithmetic
is exact rationals; rounding happens only in display code.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from fractions import Fraction

TPC_UNITS = frozenset({"streams-per-usd", "frames-per-second-per-usd"})

HOURS_PER_MONTH = 24 * 30


class CostError(Exception):
    pass


@dataclass(frozen=True)
class CostSheet:
    label: str
    components: tuple  # ((name, usd), ...)
    watts: Fraction
    lifetime_months: int = 36
    utilization: Fraction = Fraction(1, 2)
    electricity_usd_per_kwh: Fraction = Fraction("0.0786")
    pue: Fraction = Fraction(2)

    def __post_init__(self):
        if not self.components:
            raise CostError(f"cost sheet {self.label!r} has no components")
        for name, usd in self.components:
            if not name:
                raise CostError("component names must be non-empty")
            if Fraction(usd) < 0:
                raise CostError(f"component {name!r} has negative cost")
        if self.watts < 0:
            raise CostError("watts must be nonnegative")
        if self.lifetime_months <= 0:
            raise CostError("lifetime must be positive")
        if not 0 <= self.utilization <= 1:
            raise CostError("utilization must be within [0, 1]")
        if self.pue < 1:
            raise CostError("PUE cannot be below 1")

    @property
    def capex_usd(self) -> Fraction:
        return sum((Fraction(usd) for _, usd in self.components), Fraction(0))


@dataclass(frozen=True)
class MonthlyTco:
    label: str
    amortized_capex_usd: Fraction
    energy_kwh: Fraction
    electricity_usd: Fraction
    pue_overhead_usd: Fraction
    total_usd: Fraction


def amortized_capex(sheet: CostSheet) -> Fraction:
    return sheet.capex_usd / sheet.lifetime_months


def monthly_energy_kwh(sheet: CostSheet) -> Fraction:
    """IT energy per month at average utilization, excluding PUE."""
    return sheet.watts * sheet.utilization * HOURS_PER_MONTH / 1000


def monthly_electricity_cost(sheet: CostSheet) -> Fraction:
    """Facility electricity per month: IT draw times PUE."""
    return monthly_energy_kwh(sheet) * sheet.electricity_usd_per_kwh * sheet.pue


def monthly_tco(sheet: CostSheet) -> MonthlyTco:
    capex = amortized_capex(sheet)
    kwh = monthly_energy_kwh(sheet)
    base = kwh * sheet.electricity_usd_per_kwh
    overhead = base * (sheet.pue - 1)
    return MonthlyTco(
        label=sheet.label,
        amortized_capex_usd=capex,
        energy_kwh=kwh,
        electricity_usd=base,
        pue_overhead_usd=overhead,
        total_usd=capex + base + overhead,
    )


@dataclass(frozen=True)
class TpCValue:
    value: Fraction
    units: str

    def __post_init__(self):
        if self.units not in TPC_UNITS:
            raise CostError(f"unknown TpC units {self.units!r}")


def tpc(throughput, tco, units: str) -> TpCValue:
    """Throughput per monthly dollar; tco is a MonthlyTco or a plain total."""
    total = tco.total_usd if isinstance(tco, MonthlyTco) else Fraction(tco)
    if total <= 0:
        raise CostError("monthly cost must be positive")
    return TpCValue(value=Fraction(throughput) / total, units=units)


_SHEET_KEYS = {
    "label",
    "components",
    "watts",
    "lifetime_months",
    "utilization",
    "electricity_usd_per_kwh",
    "pue",
}


def load_cost_sheet(source) -> CostSheet:
    """Build a CostSheet from a JSON object or a path to one.

    Numeric fields accept decimal strings so exact values survive the
    round trip through JSON.
    """
    if isinstance(source, (str, os.PathLike)):
        with open(source, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    else:
        data = dict(source)
    unknown = set(data) - _SHEET_KEYS
    if unknown:
        raise CostError(f"unknown cost sheet fields: {sorted(unknown)}")
    try:
        components = tuple((name, Fraction(str(usd))) for name, usd in data["components"])
        kwargs = {
            "label": data["label"],
            "components": components,
            "watts": Fraction(str(data["watts"])),
        }
    except KeyError as exc:
        raise CostError(f"cost sheet missing field {exc.args[0]!r}") from None
    if "lifetime_months" in data:
        kwargs["lifetime_months"] = int(data["lifetime_months"])
    for field in ("utilization", "electricity_usd_per_kwh", "pue"):
        if field in data:
            kwargs[field] = Fraction(str(data[field]))
    return CostSheet(**kwargs)
