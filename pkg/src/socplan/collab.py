"""Latency model for collaborative inference across several SoCs.

One model instance describes tensor-width splitting: every layer's
channels are divided evenly over n SoCs, so compute shrinks like Amdahl's
law with a serial fraction that covers the unsplittable work, while the
per-layer activation exchange adds communication that grows with n.
Pipelining hides part of that exchange behind compute on back-to-back
requests; overlap_fraction says how much.

Fitting helpers derive the serial fraction from two measured latencies and
the communication term from a measured communication share, all in exact
rational arithmetic.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction


class Infeasible(ValueError):
    pass


@dataclass(frozen=True)
class LatencyBreakdown:
    socs: int
    compute_ms: Fraction
    comm_ms: Fraction
    exposed_comm_ms: Fraction
    total_ms: Fraction

    @property
    def comm_share(self) -> Fraction:
        """Share of end-to-end latency spent waiting on the network."""
        return self.exposed_comm_ms / self.total_ms


@dataclass(frozen=True)
class CollabModel:
    t1_ms: Fraction
    serial_fraction: Fraction
    comm_setup_ms: Fraction = Fraction(0)
    comm_per_extra_soc_ms: Fraction = Fraction(0)
    comm_table: tuple = ()  # ((n, ms), ...) overrides the linear term
    overlap_fraction: Fraction = Fraction(0)

    def __post_init__(self):
        if self.t1_ms <= 0:
            raise Infeasible("single-SoC latency must be positive")
        if not 0 <= self.serial_fraction <= 1:
            raise Infeasible("serial fraction must be within [0, 1]")
        if self.comm_setup_ms < 0 or self.comm_per_extra_soc_ms < 0:
            raise Infeasible("communication terms must be nonnegative")
        if not 0 <= self.overlap_fraction <= 1:
            raise Infeasible("overlap fraction must be within [0, 1]")
        for n, ms in self.comm_table:
            if n < 2 or Fraction(ms) < 0:
                raise Infeasible("comm table entries need n >= 2 and nonnegative ms")


def fit_amdahl(t1_ms, tn_ms, n: int) -> Fraction:
    """Serial fraction implied by latencies at 1 and n SoCs.

    Solves tn = t1 * (f + (1 - f) / n) exactly.  Out-of-range results are
    clamped into [0, 1] with a warning: a fit above 1 means splitting made
    things slower than serial, below 0 means superlinear scaling, and
    either way Amdahl's form cannot represent it more faithfully than the
    boundary.
    """
    t1 = Fraction(t1_ms)
    tn = Fraction(tn_ms)
    if t1 <= 0 or tn <= 0:
        raise Infeasible("latencies must be positive")
    if n < 2:
        raise Infeasible("fit needs n >= 2")
    f = Fraction(n * tn - t1, 1) / (t1 * (n - 1))
    if f < 0:
        warnings.warn(f"fit gave serial fraction {float(f):.4f}; clamping to 0", stacklevel=2)
        return Fraction(0)
    if f > 1:
        warnings.warn(f"fit gave serial fraction {float(f):.4f}; clamping to 1", stacklevel=2)
        return Fraction(1)
    return f


def compute_time(model: CollabModel, n: int) -> Fraction:
    if n < 1:
        raise Infeasible("need at least one SoC")
    f = model.serial_fraction
    return model.t1_ms * (f + (1 - f) / n)


def comm_time(model: CollabModel, n: int) -> Fraction:
    if n < 1:
        raise Infeasible("need at least one SoC")
    if n == 1:
        return Fraction(0)
    for entry_n, ms in model.comm_table:
        if entry_n == n:
            return Fraction(ms)
    return model.comm_setup_ms + model.comm_per_extra_soc_ms * (n - 1)


def total_latency(model: CollabModel, n: int, pipelined: bool = False) -> LatencyBreakdown:
    compute = compute_time(model, n)
    comm = comm_time(model, n)
    exposed = comm * (1 - model.overlap_fraction) if pipelined else comm
    return LatencyBreakdown(
        socs=n,
        compute_ms=compute,
        comm_ms=comm,
        exposed_comm_ms=exposed,
        total_ms=compute + exposed,
    )


def speedup(model: CollabModel, n: int, pipelined: bool = False) -> Fraction:
    return model.t1_ms / total_latency(model, n, pipelined).total_ms


def calibrate_from_shares(
    t1_ms,
    tn_ms,
    n: int,
    serial_comm_share,
    pipelined_comm_share=None,
) -> CollabModel:
    """Build a model from two latencies and observed communication shares.

    serial_comm_share is comm / (compute + comm) at n SoCs without
    pipelining; the linear communication term is sized so the model
    reproduces it exactly.  When pipelined_comm_share is given, the
    overlap fraction is solved so the pipelined share matches too.
    """
    f = fit_amdahl(t1_ms, tn_ms, n)
    compute_n = Fraction(tn_ms)
    s1 = Fraction(serial_comm_share)
    if not 0 <= s1 < 1:
        raise Infeasible("communication share must be within [0, 1)")
    comm_n = compute_n * s1 / (1 - s1)
    overlap = Fraction(0)
    if pipelined_comm_share is not None:
        s2 = Fraction(pipelined_comm_share)
        if not 0 <= s2 < 1:
            raise Infeasible("communication share must be within [0, 1)")
        if s2 > s1:
            raise Infeasible("pipelining cannot raise the communication share")
        exposed = compute_n * s2 / (1 - s2)
        overlap = 1 - exposed / comm_n if comm_n else Fraction(0)
    return CollabModel(
        t1_ms=Fraction(t1_ms),
        serial_fraction=f,
        comm_per_extra_soc_ms=comm_n / (n - 1),
        overlap_fraction=overlap,
    )


def resnet50_width_split() -> CollabModel:
    """Model fitted to the bundled 5-SoC image-classification measurements."""
    return calibrate_from_shares(
        t1_ms=80,
        tn_ms=34,
        n=5,
        serial_comm_share=Fraction("0.415"),
        pipelined_comm_share=Fraction("0.229"),
    )
