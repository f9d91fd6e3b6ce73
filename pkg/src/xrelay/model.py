"""Network configuration, seeded channel generation, and stream allocation.

Node numbering follows the two-group layout: nodes 1, 2 on one side exchange
messages with nodes 3, 4 on the other side through the relay, giving the four
communicating pairs (1,3), (1,4), (2,3), (2,4).  Both directions of a pair
carry the same number of streams.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InfeasibleRegime, RankDeficient
from .numerics import DEFAULT_TOL, TolerancePolicy, numerical_rank

__all__ = [
    "PAIRS",
    "SOURCE_NODES",
    "NetworkConfig",
    "ChannelRealization",
    "StreamAllocation",
    "node_pairs",
    "partner",
    "draw_channels",
    "allocate_streams",
]

#: Communicating source-node pairs, in canonical order.  Relay-side stream
#: blocks (columns of the decoding basis and of the relay beamformers) are
#: always laid out in this order.
PAIRS: tuple[tuple[int, int], ...] = ((1, 3), (1, 4), (2, 3), (2, 4))

SOURCE_NODES: tuple[int, ...] = (1, 2, 3, 4)


def node_pairs(node: int) -> tuple[tuple[int, int], ...]:
    """The two pairs a source node belongs to, in canonical order."""
    return tuple(p for p in PAIRS if node in p)


def partner(node: int, pair: tuple[int, int]) -> int:
    """The other member of a pair."""
    i, j = pair
    return j if node == i else i


@dataclass(frozen=True)
class NetworkConfig:
    """Antenna counts and power budget for one network instance.

    ``power_P`` is the total transmit power of each source node and of the
    relay, in linear units; with the default unit noise variance the SNR in
    linear units equals ``power_P``.
    """

    M: int
    N: int
    power_P: float = 1.0
    noise_var: float = 1.0

    def __post_init__(self) -> None:
        if self.M < 1 or self.N < 1:
            raise ValueError("antenna counts must be >= 1")
        if self.power_P <= 0:
            raise ValueError("power_P must be positive")
        if self.noise_var <= 0:
            raise ValueError("noise_var must be positive")


@dataclass(frozen=True)
class ChannelRealization:
    """One draw of the eight channel matrices.

    ``uplink[i-1]`` is the N x M matrix from source node i to the relay;
    ``downlink[i-1]`` is the M x N matrix from the relay to source node i.
    Arrays are write-protected so realizations can be shared across workers.
    """

    uplink: tuple[np.ndarray, ...]
    downlink: tuple[np.ndarray, ...]
    seed: int

    def to_relay(self, node: int) -> np.ndarray:
        return self.uplink[node - 1]

    def from_relay(self, node: int) -> np.ndarray:
        return self.downlink[node - 1]


@dataclass(frozen=True)
class StreamAllocation:
    """Streams per communicating pair, plus optional relay-nulling splits.

    ``relay_null_splits`` holds (d13_1, d14_1, d23_1, d24_1): how many of
    each pair's streams the relay nulls toward the victim node on the
    opposite side, used only by the relay-side nulling scheme.
    """

    d13: int
    d14: int
    d23: int
    d24: int
    relay_null_splits: tuple[int, int, int, int] | None = None

    def __post_init__(self) -> None:
        counts = (self.d13, self.d14, self.d23, self.d24)
        if any(d < 0 for d in counts):
            raise ValueError("stream counts must be >= 0")
        if self.relay_null_splits is not None:
            if any(s < 0 for s in self.relay_null_splits):
                raise ValueError("relay-null splits must be >= 0")
            if any(s > d for s, d in zip(self.relay_null_splits, counts)):
                raise ValueError("relay-null splits cannot exceed pair counts")

    @property
    def total(self) -> int:
        return self.d13 + self.d14 + self.d23 + self.d24

    def for_pair(self, pair: tuple[int, int]) -> int:
        return dict(zip(PAIRS, (self.d13, self.d14, self.d23, self.d24)))[pair]

    def pair_counts(self) -> dict[tuple[int, int], int]:
        return dict(zip(PAIRS, (self.d13, self.d14, self.d23, self.d24)))

    def pair_slices(self) -> dict[tuple[int, int], slice]:
        """Column ranges of each pair's block in the canonical stream layout."""
        out = {}
        start = 0
        for pair, d in self.pair_counts().items():
            out[pair] = slice(start, start + d)
            start += d
        return out

    def node_streams(self, node: int) -> int:
        """Streams a node transmits (= streams it receives)."""
        return sum(self.for_pair(p) for p in node_pairs(node))


def draw_channels(
    cfg: NetworkConfig,
    seed: int,
    tol: TolerancePolicy = DEFAULT_TOL,
) -> ChannelRealization:
    """Draw the eight i.i.d. complex Gaussian channel matrices.

    Entries are CN(0, 1): real and imaginary parts each N(0, 1/2).  The draw
    is deterministic given ``(cfg, seed)`` (PCG64 with a fixed draw order);
    the same seed reproduces bit-identical matrices.  Each matrix is checked
    to be numerically full rank, which a continuous distribution guarantees
    with probability one.
    """
    rng = np.random.default_rng(seed)

    def draw(rows: int, cols: int) -> np.ndarray:
        h = (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols)))
        h *= np.sqrt(0.5)
        h.setflags(write=False)
        return h

    uplink = tuple(draw(cfg.N, cfg.M) for _ in SOURCE_NODES)
    downlink = tuple(draw(cfg.M, cfg.N) for _ in SOURCE_NODES)
    expected = min(cfg.M, cfg.N)
    for h in (*uplink, *downlink):
        if numerical_rank(h, tol) != expected:
            raise RankDeficient(
                f"channel draw (seed={seed}) is not full rank; redraw with a new seed"
            )
    return ChannelRealization(uplink=uplink, downlink=downlink, seed=seed)


def allocate_streams(cfg: NetworkConfig) -> StreamAllocation:
    """Per-pair stream counts maximizing the schemes' achievable total.

    For ``5N <= 8M`` the full budget of N network-coded streams is split by
    the residue of N mod 4 (the +1 streams go to the later pairs); the total
    equals N and the sum rate can scale as 2N.  For ``8M < 5N < 10M`` each
    pair is capped by its channel-intersection dimension 2M - N.  At
    ``N >= 2M`` the intersections are empty and no aligned scheme runs.
    """
    m, n = cfg.M, cfg.N
    if n >= 2 * m:
        raise InfeasibleRegime(
            f"N >= 2M (N={n}, M={m}): channel column spaces intersect trivially"
        )
    if 5 * n <= 8 * m:
        q, r = divmod(n, 4)
        table = {
            0: (q, q, q, q),
            1: (q, q, q, q + 1),
            2: (q, q + 1, q + 1, q),
            3: (q, q + 1, q + 1, q + 1),
        }
        return StreamAllocation(*table[r])
    per_pair = 2 * m - n
    return StreamAllocation(per_pair, per_pair, per_pair, per_pair)
