"""Relay-side nulling scheme: aligned uplink, split interference handling.

The uplink phase is identical to the joint scheme.  On the downlink the
relay does not coordinate with the receivers: each pair's network-coded
streams are beamformed so that N - M of every node's interfering streams
fall into that node's channel null space, and each node independently
projects away whatever interference remains.  The stricter stream budget
this imposes is feasible exactly when 3N <= 4M.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace

import numpy as np

from .errors import InfeasibleRegime, RankDeficient, ReducedInfeasible
from .model import (
    PAIRS,
    SOURCE_NODES,
    ChannelRealization,
    NetworkConfig,
    StreamAllocation,
    allocate_streams,
    node_pairs,
)
from .numerics import (
    DEFAULT_TOL,
    TolerancePolicy,
    left_null_space_basis,
    null_space_basis,
    numerical_rank,
)
from .sajic import _normalize_gains, design_mac

__all__ = ["VICTIMS", "ReducedDesign", "reduced_split_budget", "design_reduced"]

#: Which unintended node each pair's relay-nulled streams are steered away
#: from.  The pattern cycles through all four nodes so every node benefits
#: from exactly one pair's nulling.
VICTIMS: dict[tuple[int, int], int] = {(1, 3): 4, (1, 4): 2, (2, 3): 1, (2, 4): 3}


@dataclass(frozen=True)
class ReducedDesign:
    """Transceivers for the relay-side nulling scheme.

    Within each pair's block of ``relay_beamformers`` the victim-nulled
    columns come first (``nulled_counts`` of them), followed by the
    unconstrained columns that both unintended nodes cancel themselves.
    """

    config: NetworkConfig
    channel: ChannelRealization
    allocation: StreamAllocation
    precoders: dict[tuple[int, int], np.ndarray]
    mac_basis: np.ndarray
    receive_filters: dict[int, np.ndarray]
    relay_beamformers: np.ndarray
    nulled_counts: dict[tuple[int, int], int]


def reduced_split_budget(
    m: int, n: int, alloc: StreamAllocation
) -> tuple[int, int, int, int]:
    """Integer split of relay-nulled streams (d13_1, d14_1, d23_1, d24_1).

    Each entry counts the pair's streams nulled toward its victim on the
    left-hand side (node 1 or 2); the balance of each node's N - M nulling
    budget is carried by the right-hand-side victims.  The split must keep
    every node's residual interference within its own projection capacity.
    Found by exhaustive search over the (tiny) integer polytope; when no
    split exists the scheme cannot reach the full stream budget.
    """
    if alloc.total != n:
        raise ValueError(f"allocation totals {alloc.total}, expected N={n}")
    if n <= m:
        # Every node can project away all interference unaided.
        return (0, 0, 0, 0)
    need = n - m
    d13, d14, d23, d24 = alloc.d13, alloc.d14, alloc.d23, alloc.d24
    cap3 = m - (d13 + d23)
    cap4 = m - (d14 + d24)
    feasible = [
        s
        for s in itertools.product(
            range(d13 + 1), range(d14 + 1), range(d23 + 1), range(d24 + 1)
        )
        if s[2] + s[3] == need  # node 1 budget
        and s[0] + s[1] == need  # node 2 budget
        and s[1] + s[3] <= cap3
        and s[0] + s[2] <= cap4
    ]
    if not feasible:
        raise ReducedInfeasible(
            f"no integer relay-nulling split exists for M={m}, N={n} "
            f"(requires N <= floor(4M/3))"
        )
    # Prefer the split realized by the cyclic victim assignment.
    cyclic = (0, need, need, 0)
    return cyclic if cyclic in feasible else feasible[0]


def design_reduced(
    ch: ChannelRealization,
    cfg: NetworkConfig,
    tol: TolerancePolicy = DEFAULT_TOL,
) -> ReducedDesign:
    """Build the relay-side nulling transceivers for one realization."""
    m, n = cfg.M, cfg.N
    try:
        alloc = allocate_streams(cfg)
    except InfeasibleRegime as exc:
        raise ReducedInfeasible(str(exc)) from exc
    if alloc.total != n:
        # Degraded aligned allocation: no full stream budget to null for.
        raise ReducedInfeasible(
            f"M={m}, N={n}: aligned allocation carries {alloc.total} < N streams"
        )
    splits = reduced_split_budget(m, n, alloc)
    alloc = replace(alloc, relay_null_splits=splits)

    precoders, mac_basis = design_mac(ch, alloc, tol)
    precoders, mac_basis = _normalize_gains(precoders, mac_basis, alloc)

    relay_beamformers, nulled_counts = _relay_nulling_beamformers(ch, alloc, tol)
    receive_filters = _self_cancelling_filters(
        ch, alloc, relay_beamformers, nulled_counts, tol
    )
    return ReducedDesign(
        config=cfg,
        channel=ch,
        allocation=alloc,
        precoders=precoders,
        mac_basis=mac_basis,
        receive_filters=receive_filters,
        relay_beamformers=relay_beamformers,
        nulled_counts=nulled_counts,
    )


def _relay_nulling_beamformers(ch, alloc, tol):
    n = ch.uplink[0].shape[0]
    m = ch.downlink[0].shape[0]
    per_victim = n - m if n > m else 0
    counts = alloc.pair_counts()
    nulled_counts = {}
    for pair, d in counts.items():
        nulled = min(per_victim, d)
        if nulled < per_victim:
            raise ReducedInfeasible(
                f"pair {pair} has {d} streams, fewer than the N-M={per_victim} "
                f"its victim's nulling budget requires"
            )
        nulled_counts[pair] = nulled

    null_cols = {}
    for pair in PAIRS:
        if nulled_counts[pair] == 0:
            null_cols[pair] = np.zeros((n, 0), dtype=complex)
            continue
        basis = null_space_basis(ch.from_relay(VICTIMS[pair]), tol)
        null_cols[pair] = basis[:, : nulled_counts[pair]]

    constrained = np.hstack([null_cols[p] for p in PAIRS])
    if numerical_rank(constrained, tol) != constrained.shape[1]:
        raise RankDeficient("victim null-space directions are not independent")

    # The unconstrained columns fill the orthogonal complement of the
    # victim-nulled directions, which has exactly the remaining dimension.
    free_needed = {p: counts[p] - nulled_counts[p] for p in PAIRS}
    total_free = sum(free_needed.values())
    if total_free:
        pool = null_space_basis(constrained.conj().T, tol)
        if pool.shape[1] < total_free:
            raise RankDeficient("insufficient unconstrained relay directions")
    else:
        pool = np.zeros((n, 0), dtype=complex)

    blocks = []
    offset = 0
    for pair in PAIRS:
        k = free_needed[pair]
        blocks.append(np.hstack([null_cols[pair], pool[:, offset : offset + k]]))
        offset += k
    relay_beamformers = np.hstack(blocks)
    if numerical_rank(relay_beamformers, tol) != alloc.total:
        raise RankDeficient("relay beamformers are not linearly independent")
    return relay_beamformers, nulled_counts


def _self_cancelling_filters(ch, alloc, relay_beamformers, nulled_counts, tol):
    slices = alloc.pair_slices()
    receive_filters = {}
    for node in SOURCE_NODES:
        h = ch.from_relay(node)
        residual = []
        for pair in PAIRS:
            if node in pair:
                continue
            block = relay_beamformers[:, slices[pair]]
            if VICTIMS[pair] == node:
                # The victim-nulled leading columns vanish at this node.
                block = block[:, nulled_counts[pair] :]
            residual.append(block)
        residual_cols = np.hstack(residual) if residual else np.zeros((h.shape[1], 0))
        wanted = alloc.node_streams(node)
        basis = left_null_space_basis(h @ residual_cols, tol)
        if basis.shape[0] < wanted:
            raise RankDeficient(
                f"node {node}: residual interference leaves {basis.shape[0]} "
                f"free dimensions, needs {wanted}"
            )
        filt = basis[:wanted, :]
        desired = np.hstack([relay_beamformers[:, slices[p]] for p in node_pairs(node)])
        if numerical_rank(filt @ h @ desired, tol) != wanted:
            raise RankDeficient(f"node {node}: desired link lost rank after filtering")
        receive_filters[node] = filt
    return receive_filters
