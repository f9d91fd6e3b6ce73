"""End-to-end two-phase exchange with XOR relaying over a finite alphabet.

Bits ride antipodal symbols (bit 0 -> +1, bit 1 -> -1), one symbol per
stream.  After zero forcing, each relay stream carries the sum of the two
partners' symbols, which lands in {-2, 0, +2}; the midpoint threshold at
|.| = 1 turns that sum into the XOR of the two bits without the relay ever
seeing either bit individually.  The relay rebroadcasts the XOR bits and
each node strips its own contribution to read its partner's bits.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .diagnostics import assert_valid
from .model import StreamAllocation, node_pairs, partner
from .numerics import DEFAULT_TOL, TolerancePolicy, pseudo_inverse
from .sajic import desired_beamformers, node_effective_matrix

__all__ = ["MessageSet", "ExchangeResult", "run_exchange"]

_DIRECTED = ((1, 3), (3, 1), (1, 4), (4, 1), (2, 3), (3, 2), (2, 4), (4, 2))


@dataclass(frozen=True)
class MessageSet:
    """One bit vector per directed message, keyed by (source, destination)."""

    bits: dict[tuple[int, int], np.ndarray]

    @classmethod
    def random(cls, alloc: StreamAllocation, seed: int) -> "MessageSet":
        rng = np.random.default_rng(seed)
        bits = {
            (i, j): rng.integers(0, 2, size=_pair_count(alloc, i, j), dtype=np.int8)
            for (i, j) in _DIRECTED
        }
        return cls(bits)

    @classmethod
    def zeros(cls, alloc: StreamAllocation) -> "MessageSet":
        bits = {
            (i, j): np.zeros(_pair_count(alloc, i, j), dtype=np.int8)
            for (i, j) in _DIRECTED
        }
        return cls(bits)

    def matches(self, alloc: StreamAllocation) -> bool:
        return all(
            len(self.bits[(i, j)]) == _pair_count(alloc, i, j) for (i, j) in _DIRECTED
        )


def _pair_count(alloc: StreamAllocation, i: int, j: int) -> int:
    return alloc.for_pair((i, j) if (i, j) in alloc.pair_counts() else (j, i))


@dataclass(frozen=True)
class ExchangeResult:
    recovered: MessageSet
    relay_xor_errors: int
    node_bit_errors: dict[int, int]

    @property
    def total_bit_errors(self) -> int:
        return sum(self.node_bit_errors.values())


def run_exchange(
    design,
    msgs: MessageSet,
    noise_var: float,
    seed: int = 0,
    tol: TolerancePolicy = DEFAULT_TOL,
) -> ExchangeResult:
    """Run one two-phase exchange and report what every node recovered.

    Transmissions use unit per-stream amplitude: this path verifies the
    structural zero-interference claims, not finite-SNR rates.  With
    ``noise_var == 0`` recovery must be exact for a valid design.
    """
    if noise_var < 0:
        raise ValueError("noise_var must be >= 0")
    assert_valid(design, tol)
    if not msgs.matches(design.allocation):
        raise ValueError("message lengths do not match the stream allocation")
    ch, alloc = design.channel, design.allocation
    rng = np.random.default_rng(seed) if noise_var > 0 else None

    # Multiple access: all four nodes transmit simultaneously.
    y_r = np.zeros(design.mac_basis.shape[0], dtype=complex)
    for (i, j), bits in msgs.bits.items():
        y_r = y_r + ch.to_relay(i) @ (design.precoders[(i, j)] @ _antipodal(bits))
    y_r = y_r + _noise(rng, noise_var, y_r.shape[0])

    sum_estimates = pseudo_inverse(design.mac_basis, tol) @ y_r
    xor_hat = _pnc_demap(sum_estimates)

    xor_true = np.concatenate(
        [msgs.bits[(i, j)] ^ msgs.bits[(j, i)] for (i, j) in alloc.pair_counts()]
    ) if alloc.total else np.zeros(0, dtype=np.int8)
    relay_xor_errors = int(np.count_nonzero(xor_hat != xor_true))

    # Broadcast: the relay re-encodes the XOR bits along its beamformers.
    x_r = design.relay_beamformers @ _antipodal(xor_hat)

    recovered: dict[tuple[int, int], np.ndarray] = {}
    node_bit_errors: dict[int, int] = {}
    slices = alloc.pair_slices()
    for node in (1, 2, 3, 4):
        y = ch.from_relay(node) @ x_r + _noise(rng, noise_var, ch.from_relay(node).shape[0])
        z = design.receive_filters[node] @ y
        errors = 0
        if alloc.node_streams(node):
            t = node_effective_matrix(design, node)
            q_hat = np.linalg.solve(t, z)
            xor_bits = (q_hat.real < 0).astype(np.int8)
            offset = 0
            for pair in node_pairs(node):
                d = alloc.for_pair(pair)
                other = partner(node, pair)
                own = msgs.bits[(node, other)]
                decoded = xor_bits[offset : offset + d] ^ own
                recovered[(other, node)] = decoded
                errors += int(np.count_nonzero(decoded != msgs.bits[(other, node)]))
                offset += d
        else:
            for pair in node_pairs(node):
                recovered[(partner(node, pair), node)] = np.zeros(0, dtype=np.int8)
        node_bit_errors[node] = errors

    return ExchangeResult(
        recovered=MessageSet(recovered),
        relay_xor_errors=relay_xor_errors,
        node_bit_errors=node_bit_errors,
    )


def _antipodal(bits: np.ndarray) -> np.ndarray:
    return 1.0 - 2.0 * np.asarray(bits, dtype=float)


def _pnc_demap(sum_estimates: np.ndarray) -> np.ndarray:
    """XOR bits from summed antipodal symbols: |s + s'| < 1 means the bits differ.

    Consumes only the zero-forced relay observations, so the relay stays
    blind to the individual messages.
    """
    return (np.abs(sum_estimates.real) < 1.0).astype(np.int8)


def _noise(rng, noise_var: float, size: int) -> np.ndarray:
    if rng is None or noise_var == 0:
        return np.zeros(size, dtype=complex)
    scale = np.sqrt(noise_var / 2.0)
    return scale * (rng.standard_normal(size) + 1j * rng.standard_normal(size))
