"""Aligned transceiver construction with joint interference cancellation.

The construction runs in three steps for one channel realization:

1. Uplink alignment: each pair's precoders steer both partners' streams onto
   a shared relay-side direction drawn from the intersection of their two
   channel column spaces, so the relay sees one summed symbol per stream.
2. Downlink receive alignment: each pair picks receive-filter rows whose
   effective channels (filter row times downlink channel) coincide, drawn
   from the intersection of the two downlink row spaces.
3. Relay beamforming: each pair's broadcast beamformers are taken from the
   null space of every other pair's effective rows, so unintended streams
   vanish after the receive filters.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AlignmentInfeasible, RankDeficient
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
    column_space_intersection,
    null_space_basis,
    numerical_rank,
    pseudo_inverse,
    row_space_intersection,
)

__all__ = [
    "TransceiverDesign",
    "design_mac",
    "design_bc_receive",
    "design_bc_transmit",
    "design_full",
    "stream_powers",
    "desired_beamformers",
    "node_effective_matrix",
]


@dataclass(frozen=True)
class TransceiverDesign:
    """A complete aligned transceiver design for one channel realization.

    ``precoders[(i, j)]`` is the M x d_ij beamformer of node i for its
    message to node j; ``mac_basis`` stacks the shared relay-side directions
    (N x total); ``receive_filters[i]`` holds node i's filter rows (one row
    per incoming stream, pairs in canonical order); ``effective_rows`` stacks
    the aligned downlink rows (total x N); ``relay_beamformers`` is N x total.
    """

    config: NetworkConfig
    channel: ChannelRealization
    allocation: StreamAllocation
    precoders: dict[tuple[int, int], np.ndarray]
    mac_basis: np.ndarray
    receive_filters: dict[int, np.ndarray]
    effective_rows: np.ndarray
    relay_beamformers: np.ndarray


def design_mac(
    ch: ChannelRealization,
    alloc: StreamAllocation,
    tol: TolerancePolicy = DEFAULT_TOL,
) -> tuple[dict[tuple[int, int], np.ndarray], np.ndarray]:
    """Aligned uplink precoders and the relay decoding basis.

    For each pair (i, j), d_ij orthonormal directions g are drawn from the
    intersection of the column spaces of the two uplink channels; applying
    each channel's pseudoinverse to g yields precoder columns that map onto
    g exactly from both sides.  The stacked basis must be full column rank
    for the relay to separate the summed streams.
    """
    n = ch.uplink[0].shape[0]
    uplink_pinv = {i: pseudo_inverse(ch.to_relay(i), tol) for i in SOURCE_NODES}
    precoders: dict[tuple[int, int], np.ndarray] = {}
    blocks = []
    for (i, j), d in alloc.pair_counts().items():
        if d == 0:
            m = ch.to_relay(i).shape[1]
            precoders[(i, j)] = np.zeros((m, 0), dtype=complex)
            precoders[(j, i)] = np.zeros((m, 0), dtype=complex)
            blocks.append(np.zeros((n, 0), dtype=complex))
            continue
        basis = column_space_intersection(ch.to_relay(i), ch.to_relay(j), tol)
        if basis.shape[1] < d:
            raise AlignmentInfeasible(
                f"pair {(i, j)}: uplink intersection dimension {basis.shape[1]} < {d}"
            )
        g = basis[:, :d]
        precoders[(i, j)] = uplink_pinv[i] @ g
        precoders[(j, i)] = uplink_pinv[j] @ g
        blocks.append(g)
    mac_basis = np.hstack(blocks) if blocks else np.zeros((n, 0), dtype=complex)
    if numerical_rank(mac_basis, tol) != alloc.total:
        raise RankDeficient("relay decoding basis is not full column rank")
    return precoders, mac_basis


def design_bc_receive(
    ch: ChannelRealization,
    alloc: StreamAllocation,
    tol: TolerancePolicy = DEFAULT_TOL,
) -> tuple[dict[int, np.ndarray], np.ndarray]:
    """Aligned receive filters and the stacked effective downlink rows.

    For each pair, d_ij orthonormal rows w are drawn from the intersection
    of the two downlink row spaces; the filter row at node i is w applied to
    the pseudoinverse of its downlink channel, the unique row whose effective
    channel reproduces w.  The total effective rows must be independent.
    """
    n = ch.downlink[0].shape[1]
    downlink_pinv = {i: pseudo_inverse(ch.from_relay(i), tol) for i in SOURCE_NODES}
    pair_rows: dict[tuple[int, int], np.ndarray] = {}
    filter_rows: dict[tuple[int, int], np.ndarray] = {}
    for (i, j), d in alloc.pair_counts().items():
        if d == 0:
            pair_rows[(i, j)] = np.zeros((0, n), dtype=complex)
            m = ch.from_relay(i).shape[0]
            filter_rows[(i, j)] = np.zeros((0, m), dtype=complex)
            filter_rows[(j, i)] = np.zeros((0, m), dtype=complex)
            continue
        basis = row_space_intersection(ch.from_relay(i), ch.from_relay(j), tol)
        if basis.shape[0] < d:
            raise AlignmentInfeasible(
                f"pair {(i, j)}: downlink row-space intersection {basis.shape[0]} < {d}"
            )
        w = basis[:d, :]
        pair_rows[(i, j)] = w
        filter_rows[(i, j)] = w @ downlink_pinv[i]
        filter_rows[(j, i)] = w @ downlink_pinv[j]
    receive_filters = {
        node: np.vstack([filter_rows[(node, partner_of(node, p))] for p in node_pairs(node)])
        for node in SOURCE_NODES
    }
    effective_rows = np.vstack([pair_rows[p] for p in PAIRS])
    if numerical_rank(effective_rows, tol) != alloc.total:
        raise RankDeficient("stacked effective downlink rows are not independent")
    return receive_filters, effective_rows


def partner_of(node: int, pair: tuple[int, int]) -> int:
    i, j = pair
    return j if node == i else i


def design_bc_transmit(
    effective_rows: np.ndarray,
    alloc: StreamAllocation,
    tol: TolerancePolicy = DEFAULT_TOL,
) -> np.ndarray:
    """Relay broadcast beamformers nulling every unintended effective row.

    Each pair's beamformers live in the null space of the other pairs'
    effective rows; the receive alignment makes the shared row of an aligned
    pair appear once in that stack, which is exactly what frees enough null
    dimensions.
    """
    n = effective_rows.shape[1]
    slices = alloc.pair_slices()
    blocks = []
    for pair, d in alloc.pair_counts().items():
        if d == 0:
            blocks.append(np.zeros((n, 0), dtype=complex))
            continue
        sl = slices[pair]
        unintended = np.delete(effective_rows, np.arange(sl.start, sl.stop), axis=0)
        basis = null_space_basis(unintended, tol)
        if basis.shape[1] < d:
            raise RankDeficient(
                f"pair {pair}: null space of unintended rows has dimension "
                f"{basis.shape[1]} < {d}"
            )
        blocks.append(basis[:, :d])
    relay_beamformers = np.hstack(blocks) if blocks else np.zeros((n, 0), dtype=complex)
    if numerical_rank(relay_beamformers, tol) != alloc.total:
        raise RankDeficient("relay beamformers are not linearly independent")
    return relay_beamformers


def design_full(
    ch: ChannelRealization,
    cfg: NetworkConfig,
    tol: TolerancePolicy = DEFAULT_TOL,
) -> TransceiverDesign:
    """Compose the three design steps and normalize per-stream gains.

    Each shared uplink direction is rescaled so the larger of its two
    precoder columns has unit norm; per-stream transmit powers then split
    the node budget evenly (see ``stream_powers``).
    """
    alloc = allocate_streams(cfg)
    precoders, mac_basis = design_mac(ch, alloc, tol)
    receive_filters, effective_rows = design_bc_receive(ch, alloc, tol)
    relay_beamformers = design_bc_transmit(effective_rows, alloc, tol)
    precoders, mac_basis = _normalize_gains(precoders, mac_basis, alloc)
    return TransceiverDesign(
        config=cfg,
        channel=ch,
        allocation=alloc,
        precoders=precoders,
        mac_basis=mac_basis,
        receive_filters=receive_filters,
        effective_rows=effective_rows,
        relay_beamformers=relay_beamformers,
    )


def _normalize_gains(precoders, mac_basis, alloc):
    mac_basis = mac_basis.copy()
    out = dict(precoders)
    for pair, sl in alloc.pair_slices().items():
        if sl.start == sl.stop:
            continue
        i, j = pair
        ni = np.linalg.norm(out[(i, j)], axis=0)
        nj = np.linalg.norm(out[(j, i)], axis=0)
        alpha = 1.0 / np.maximum(ni, nj)
        out[(i, j)] = out[(i, j)] * alpha
        out[(j, i)] = out[(j, i)] * alpha
        mac_basis[:, sl] = mac_basis[:, sl] * alpha
    return out, mac_basis


def stream_powers(alloc: StreamAllocation, cfg: NetworkConfig) -> tuple[float, float]:
    """Equal per-stream powers (source, relay) under the node budget P.

    Source streams share P across the busiest node's stream count, so every
    node stays within budget even when the allocation is asymmetric; relay
    beamformers are unit-norm, so the relay splits P across all streams.
    """
    busiest = max(alloc.node_streams(node) for node in SOURCE_NODES)
    p_stream = cfg.power_P / busiest if busiest else cfg.power_P
    p_relay = cfg.power_P / alloc.total if alloc.total else cfg.power_P
    return p_stream, p_relay


def desired_beamformers(design, node: int) -> np.ndarray:
    """Relay beamformer columns carrying streams destined to ``node``."""
    slices = design.allocation.pair_slices()
    cols = [design.relay_beamformers[:, slices[p]] for p in node_pairs(node)]
    return np.hstack(cols)


def node_effective_matrix(design, node: int) -> np.ndarray:
    """Filtered end-to-end matrix from the node's desired relay streams."""
    d = design.receive_filters[node]
    return d @ design.channel.from_relay(node) @ desired_beamformers(design, node)
