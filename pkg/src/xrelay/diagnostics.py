"""Structural invariant checks for finished transceiver designs.

Every quantity the designers promise (alignment residuals, nulling
residuals, rank conditions, leakage, power budgets) is recomputed here from
scratch so the checks stay independent of the construction path.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DesignInvalid
from .model import PAIRS, SOURCE_NODES, node_pairs
from .numerics import DEFAULT_TOL, TolerancePolicy, numerical_rank
from .reduced import VICTIMS, ReducedDesign
from .sajic import TransceiverDesign, node_effective_matrix, stream_powers

__all__ = ["DesignReport", "diagnose", "assert_valid"]


@dataclass(frozen=True)
class DesignReport:
    """Worst-case residuals and rank/power facts for one design."""

    scheme: str
    total_streams: int
    mac_alignment_residual: float
    mac_basis_rank: int
    relay_rank: int
    max_leakage: float
    desired_link_ranks: dict[int, int]
    desired_link_expected: dict[int, int]
    node_power: dict[int, float]
    relay_power: float
    power_budget: float
    bc_alignment_residual: float | None = None
    effective_rows_rank: int | None = None
    relay_null_residual: float | None = None
    nulling_budget: dict[int, int] = field(default_factory=dict)
    nulling_budget_expected: int = 0

    def failures(self, tol: TolerancePolicy = DEFAULT_TOL) -> list[str]:
        eps = tol.residual_eps
        out = []
        if self.mac_alignment_residual > eps:
            out.append(f"uplink alignment residual {self.mac_alignment_residual:.2e}")
        if self.bc_alignment_residual is not None and self.bc_alignment_residual > eps:
            out.append(f"downlink alignment residual {self.bc_alignment_residual:.2e}")
        if self.relay_null_residual is not None and self.relay_null_residual > eps:
            out.append(f"relay nulling residual {self.relay_null_residual:.2e}")
        if self.mac_basis_rank != self.total_streams:
            out.append(f"decoding basis rank {self.mac_basis_rank} != {self.total_streams}")
        if self.effective_rows_rank is not None and self.effective_rows_rank != self.total_streams:
            out.append(f"effective rows rank {self.effective_rows_rank} != {self.total_streams}")
        if self.relay_rank != self.total_streams:
            out.append(f"relay beamformer rank {self.relay_rank} != {self.total_streams}")
        if self.max_leakage > eps:
            out.append(f"interference leakage {self.max_leakage:.2e}")
        for node in SOURCE_NODES:
            if self.desired_link_ranks[node] != self.desired_link_expected[node]:
                out.append(
                    f"node {node} desired link rank {self.desired_link_ranks[node]} "
                    f"!= {self.desired_link_expected[node]}"
                )
        budget_slack = 1.0 + 1e-12
        for node, p in self.node_power.items():
            if p > self.power_budget * budget_slack:
                out.append(f"node {node} power {p:.6f} exceeds {self.power_budget}")
        if self.relay_power > self.power_budget * budget_slack:
            out.append(f"relay power {self.relay_power:.6f} exceeds {self.power_budget}")
        for node, dim in self.nulling_budget.items():
            if dim != self.nulling_budget_expected:
                out.append(
                    f"node {node} relay-nulled dimension {dim} != {self.nulling_budget_expected}"
                )
        return out

    def ok(self, tol: TolerancePolicy = DEFAULT_TOL) -> bool:
        return not self.failures(tol)


def diagnose(design, tol: TolerancePolicy = DEFAULT_TOL) -> DesignReport:
    """Recompute all invariants of a joint or relay-side-nulling design."""
    if isinstance(design, TransceiverDesign):
        return _diagnose_sajic(design, tol)
    if isinstance(design, ReducedDesign):
        return _diagnose_reduced(design, tol)
    raise TypeError(f"unsupported design type: {type(design).__name__}")


def assert_valid(design, tol: TolerancePolicy = DEFAULT_TOL) -> DesignReport:
    """Diagnose and raise ``DesignInvalid`` when any invariant fails."""
    report = diagnose(design, tol)
    failures = report.failures(tol)
    if failures:
        raise DesignInvalid("; ".join(failures))
    return report


def _mac_alignment_residual(design) -> float:
    ch, alloc = design.channel, design.allocation
    worst = 0.0
    for pair, sl in alloc.pair_slices().items():
        if sl.start == sl.stop:
            continue
        i, j = pair
        g = design.mac_basis[:, sl]
        a = ch.to_relay(i) @ design.precoders[(i, j)]
        b = ch.to_relay(j) @ design.precoders[(j, i)]
        per_stream = np.linalg.norm(a - b, axis=0) / np.linalg.norm(g, axis=0)
        worst = max(worst, float(per_stream.max()))
    return worst


def _node_pair_row_slices(alloc, node):
    out = {}
    start = 0
    for pair in node_pairs(node):
        d = alloc.for_pair(pair)
        out[pair] = slice(start, start + d)
        start += d
    return out


def _leakage(design) -> float:
    slices = design.allocation.pair_slices()
    worst = 0.0
    for node in SOURCE_NODES:
        filt = design.receive_filters[node]
        if filt.shape[0] == 0:
            continue
        unintended = [slices[p] for p in PAIRS if node not in p]
        cols = np.hstack([design.relay_beamformers[:, sl] for sl in unintended])
        if cols.shape[1] == 0:
            continue
        leak = filt @ design.channel.from_relay(node) @ cols
        worst = max(worst, float(np.linalg.norm(leak, axis=0).max()))
    return worst


def _powers(design):
    p_stream, p_relay = stream_powers(design.allocation, design.config)
    node_power = {}
    for node in SOURCE_NODES:
        total = 0.0
        for pair in node_pairs(node):
            v = design.precoders[(node, _partner(node, pair))]
            total += p_stream * float(np.sum(np.abs(v) ** 2))
        node_power[node] = total
    relay_power = p_relay * float(np.sum(np.abs(design.relay_beamformers) ** 2))
    return node_power, relay_power


def _partner(node, pair):
    i, j = pair
    return j if node == i else i


def _desired_ranks(design, tol):
    ranks, expected = {}, {}
    for node in SOURCE_NODES:
        expected[node] = design.allocation.node_streams(node)
        t = node_effective_matrix(design, node)
        ranks[node] = numerical_rank(t, tol) if t.size else 0
    return ranks, expected


def _diagnose_sajic(design: TransceiverDesign, tol: TolerancePolicy) -> DesignReport:
    ch, alloc = design.channel, design.allocation
    bc_worst = 0.0
    for pair, sl in alloc.pair_slices().items():
        if sl.start == sl.stop:
            continue
        i, j = pair
        w = design.effective_rows[sl, :]
        rows_i = design.receive_filters[i][_node_pair_row_slices(alloc, i)[pair], :]
        rows_j = design.receive_filters[j][_node_pair_row_slices(alloc, j)[pair], :]
        diff = rows_i @ ch.from_relay(i) - rows_j @ ch.from_relay(j)
        per_stream = np.linalg.norm(diff, axis=1) / np.linalg.norm(w, axis=1)
        bc_worst = max(bc_worst, float(per_stream.max()))
    ranks, expected = _desired_ranks(design, tol)
    node_power, relay_power = _powers(design)
    return DesignReport(
        scheme="sajic",
        total_streams=alloc.total,
        mac_alignment_residual=_mac_alignment_residual(design),
        bc_alignment_residual=bc_worst,
        mac_basis_rank=numerical_rank(design.mac_basis, tol),
        effective_rows_rank=numerical_rank(design.effective_rows, tol),
        relay_rank=numerical_rank(design.relay_beamformers, tol),
        max_leakage=_leakage(design),
        desired_link_ranks=ranks,
        desired_link_expected=expected,
        node_power=node_power,
        relay_power=relay_power,
        power_budget=design.config.power_P,
    )


def _diagnose_reduced(design: ReducedDesign, tol: TolerancePolicy) -> DesignReport:
    ch, alloc = design.channel, design.allocation
    slices = alloc.pair_slices()
    null_worst = 0.0
    budget = {node: 0 for node in SOURCE_NODES}
    for pair in PAIRS:
        nulled = design.nulled_counts[pair]
        if nulled == 0:
            continue
        victim = VICTIMS[pair]
        budget[victim] += nulled
        cols = design.relay_beamformers[:, slices[pair]][:, :nulled]
        res = np.linalg.norm(ch.from_relay(victim) @ cols, axis=0)
        null_worst = max(null_worst, float(res.max()))
    ranks, expected = _desired_ranks(design, tol)
    node_power, relay_power = _powers(design)
    n, m = design.config.N, design.config.M
    return DesignReport(
        scheme="reduced",
        total_streams=alloc.total,
        mac_alignment_residual=_mac_alignment_residual(design),
        mac_basis_rank=numerical_rank(design.mac_basis, tol),
        relay_rank=numerical_rank(design.relay_beamformers, tol),
        max_leakage=_leakage(design),
        desired_link_ranks=ranks,
        desired_link_expected=expected,
        node_power=node_power,
        relay_power=relay_power,
        power_budget=design.config.power_P,
        relay_null_residual=null_worst,
        nulling_budget=budget,
        nulling_budget_expected=max(0, n - m),
    )
