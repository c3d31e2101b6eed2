"""Provenance-tagged measured values that parametrize every model.

Records are keyed by (hardware, engine, workload, metric).  Lookup is
exact-match only: the measurements are sparse points and interpolating
across hardware generations or batch sizes would invent data.  Tables are
immutable after load and safe for concurrent lookup.

CSV schema (header required, comma-separated, UTF-8):

    hardware,engine,workload,metric,value,spread,provenance,citation

value and spread are decimal literals (spread may be empty); citation is
free text.  hardware, metric, and provenance come from the controlled
vocabularies below; engine and workload are free tags.
"""

from __future__ import annotations

import csv
import io
import os
from dataclasses import dataclass
from fractions import Fraction

HARDWARE_TAGS = frozenset(
    {
        "soc-cpu",
        "soc-gpu",
        "soc-dsp",
        "soc-codec",
        "intel-cpu-8core",
        "nvidia-a40",
        "nvidia-a100",
    }
)

METRIC_TAGS = frozenset(
    {
        "latency-ms",
        "max-streams-per-soc",
        "throughput-per-joule",
        "streams-per-watt",
        "frames-per-joule",
        "power-watts",
        "cpu-util-pct",
        "gpu-util-pct",
        "mem-util-pct",
    }
)

PROVENANCE_TAGS = frozenset(
    {
        "paper-table",
        "paper-text",
        "paper-figure-approx",
        "user-measured",
        "derived",
    }
)

# Tags marking values transcribed from the published measurement report;
# records carrying them must say where in the source they came from.
PUBLISHED_PROVENANCE = frozenset({"paper-table", "paper-text", "paper-figure-approx"})

CSV_HEADER = ("hardware", "engine", "workload", "metric", "value", "spread", "provenance", "citation")


class CalibrationError(Exception):
    pass


class ParseError(CalibrationError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class DuplicateKey(CalibrationError):
    def __init__(self, key, line: int | None = None):
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"duplicate calibration key {key}{where}")
        self.key = key


class NegativeValue(CalibrationError):
    def __init__(self, message: str, line: int | None = None):
        where = f" (line {line})" if line is not None else ""
        super().__init__(message + where)


class MissingCalibration(CalibrationError):
    def __init__(self, key):
        super().__init__(
            "no calibration record for hardware={0.hardware!r} engine={0.engine!r} "
            "workload={0.workload!r} metric={0.metric!r}".format(key)
        )
        self.key = key


@dataclass(frozen=True, order=True)
class CalibKey:
    hardware: str
    engine: str
    workload: str
    metric: str

    def __post_init__(self):
        for part in (self.hardware, self.engine, self.workload, self.metric):
            if not part:
                raise CalibrationError("all four key parts must be non-empty")
        if self.hardware not in HARDWARE_TAGS:
            raise CalibrationError(f"unknown hardware tag {self.hardware!r}")
        if self.metric not in METRIC_TAGS:
            raise CalibrationError(f"unknown metric tag {self.metric!r}")


@dataclass(frozen=True)
class CalibrationRecord:
    key: CalibKey
    value: Fraction
    spread: Fraction | None = None
    provenance: str = "user-measured"
    citation: str = ""

    def __post_init__(self):
        if self.value < 0:
            raise NegativeValue(f"value for {self.key} must be nonnegative")
        if self.spread is not None and self.spread < 0:
            raise NegativeValue(f"spread for {self.key} must be nonnegative")
        if self.provenance not in PROVENANCE_TAGS:
            raise CalibrationError(f"unknown provenance tag {self.provenance!r}")
        if self.provenance in PUBLISHED_PROVENANCE and not self.citation:
            raise CalibrationError(
                f"record {self.key} with provenance {self.provenance!r} needs a citation"
            )


class CalibrationTable:
    """Immutable mapping from CalibKey to CalibrationRecord."""

    def __init__(self, records):
        table = {}
        for rec in records:
            if rec.key in table:
                raise DuplicateKey(rec.key)
            table[rec.key] = rec
        self._records = table

    def __len__(self) -> int:
        return len(self._records)

    def __contains__(self, key: CalibKey) -> bool:
        return key in self._records

    def __eq__(self, other) -> bool:
        if not isinstance(other, CalibrationTable):
            return NotImplemented
        return self._records == other._records

    def records(self) -> tuple:
        """All records in canonical key order."""
        return tuple(self._records[k] for k in sorted(self._records))

    def get(self, key: CalibKey):
        return self._records.get(key)


def lookup(table: CalibrationTable, key: CalibKey) -> CalibrationRecord:
    """Exact-match lookup; raises MissingCalibration naming all key parts."""
    rec = table.get(key)
    if rec is None:
        raise MissingCalibration(key)
    return rec


def lookup_value(table: CalibrationTable, hardware: str, engine: str, workload: str, metric: str) -> Fraction:
    return lookup(table, CalibKey(hardware, engine, workload, metric)).value


def _parse_decimal(text: str, what: str, line: int) -> Fraction:
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"{what} {text!r} is not a decimal literal", line) from None
    return value


def load_calibration(source) -> CalibrationTable:
    """Parse the CSV schema from a file path or inline text.

    A string containing a newline is treated as inline CSV text; anything
    else is opened as a path.  Duplicate keys are an error, not last-wins.
    """
    if isinstance(source, (str, os.PathLike)) and "\n" not in str(source):
        with open(source, "r", encoding="utf-8", newline="") as fh:
            text = fh.read()
    else:
        text = str(source)
    reader = csv.reader(io.StringIO(text))
    rows = list(reader)
    if not rows:
        raise ParseError("missing header", 1)
    if tuple(cell.strip() for cell in rows[0]) != CSV_HEADER:
        raise ParseError(f"header must be {','.join(CSV_HEADER)}", 1)

    records = []
    seen = {}
    for idx, row in enumerate(rows[1:], start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != len(CSV_HEADER):
            raise ParseError(f"expected {len(CSV_HEADER)} fields, got {len(row)}", idx)
        hardware, engine, workload, metric, value, spread, provenance, citation = (
            cell.strip() for cell in row
        )
        try:
            key = CalibKey(hardware, engine, workload, metric)
        except CalibrationError as exc:
            raise ParseError(str(exc), idx) from None
        if key in seen:
            raise DuplicateKey(key, line=idx)
        seen[key] = idx
        parsed_value = _parse_decimal(value, "value", idx)
        if parsed_value < 0:
            raise NegativeValue(f"value for {key} must be nonnegative", line=idx)
        parsed_spread = None
        if spread:
            parsed_spread = _parse_decimal(spread, "spread", idx)
            if parsed_spread < 0:
                raise NegativeValue(f"spread for {key} must be nonnegative", line=idx)
        try:
            records.append(
                CalibrationRecord(
                    key=key,
                    value=parsed_value,
                    spread=parsed_spread,
                    provenance=provenance,
                    citation=citation,
                )
            )
        except CalibrationError as exc:
            raise ParseError(str(exc), idx) from None
    return CalibrationTable(records)


def format_decimal(value: Fraction) -> str:
    """Exact minimal decimal form of a Fraction with a 10**k denominator."""
    if value.denominator == 1:
        return str(value.numerator)
    den = value.denominator
    twos = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    fives = 0
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        raise ValueError(f"{value} has no finite decimal form")
    digits = max(twos, fives)
    scaled = value.numerator * 10**digits // value.denominator
    sign = "-" if scaled < 0 else ""
    text = str(abs(scaled)).rjust(digits + 1, "0")
    whole, frac = text[: len(text) - digits], text[len(text) - digits :]
    frac = frac.rstrip("0")
    return f"{sign}{whole}.{frac}" if frac else f"{sign}{whole}"


def serialize_calibration(table: CalibrationTable) -> str:
    """CSV text for a table, records in canonical key order.

    load_calibration(serialize_calibration(t)) == t for any table whose
    values have finite decimal forms.
    """
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for rec in table.records():
        writer.writerow(
            [
                rec.key.hardware,
                rec.key.engine,
                rec.key.workload,
                rec.key.metric,
                format_decimal(rec.value),
                format_decimal(rec.spread) if rec.spread is not None else "",
                rec.provenance,
                rec.citation,
            ]
        )
    return out.getvalue()


@dataclass(frozen=True)
class VideoProfile:
    """Metadata of one transcoding source clip.

    entropy is bits per pixel per second, a proxy for scene complexity.
    Bitrates are kilobits per second.
    """

    name: str
    width: int
    height: int
    fps: int
    entropy: float
    source_bitrate_kbps: Fraction
    target_bitrate_kbps: Fraction
    content: str = ""

    def __post_init__(self):
        if self.fps <= 0:
            raise ValueError("fps must be positive")
        if self.source_bitrate_kbps < 0 or self.target_bitrate_kbps < 0:
            raise ValueError("bitrates must be nonnegative")


@dataclass(frozen=True)
class DlModelProfile:
    name: str
    precision: str  # fp32 | int8
    task: str

    def __post_init__(self):
        if not self.name:
            raise ValueError("model name must be non-empty")
        if self.precision not in {"fp32", "int8"}:
            raise ValueError(f"unknown precision {self.precision!r}")

    @property
    def workload_tag(self) -> str:
        return f"dl:{self.name}-{self.precision}"
