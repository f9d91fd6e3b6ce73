"""Finite-SNR achievable rates and Monte Carlo ergodic sum-rate sweeps.

Rate conventions (the slope, not the constant, is the verified quantity):

* Uplink, per aligned stream: zero forcing against the decoding basis gives
  SNR ``2 p_stream / (noise_var * |f_k|^2)`` where f_k is the detector row
  and the factor 2 is the power of the two summed unit-power symbols.
* Downlink, joint scheme: per pair, log-det of the aligned effective system
  (shared rows times the pair's beamformers) at the relay's per-stream
  power.  The aligned rows are identical at both receiving nodes, so the
  rate is too.
* Downlink, relay-nulling scheme: per node, zero forcing through the
  filtered desired link, worse node of the pair counts.

A pair's rate is the smaller of its two phases (decode-and-forward), and
the network sum rate counts every pair twice, once per direction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import InfeasibleRegime, RankDeficient
from .model import (
    PAIRS,
    NetworkConfig,
    allocate_streams,
    draw_channels,
    node_pairs,
)
from .numerics import DEFAULT_TOL, TolerancePolicy, pseudo_inverse
from .reduced import ReducedDesign, design_reduced, reduced_split_budget
from .sajic import TransceiverDesign, design_full, node_effective_matrix, stream_powers

__all__ = [
    "SCHEMES",
    "RatePoint",
    "RateCurve",
    "instantaneous_rates",
    "sum_rate",
    "ergodic_sweep",
    "timeshare_sweep",
]

SCHEMES = ("sajic", "reduced", "timeshare")

_MAX_REDRAWS = 64


@dataclass(frozen=True)
class RatePoint:
    snr_db: float
    mean_sum_rate: float
    trials: int
    std_err: float


@dataclass(frozen=True)
class RateCurve:
    """Ergodic sum-rate samples over an SNR grid plus the fitted DOF slope."""

    scheme: str
    M: int
    N: int
    points: tuple[RatePoint, ...]
    fitted_slope_per_3db: float
    redraws: int = 0

    def __post_init__(self) -> None:
        snrs = [p.snr_db for p in self.points]
        if any(b <= a for a, b in zip(snrs, snrs[1:])):
            raise ValueError("snr grid must be strictly increasing")


def instantaneous_rates(design, cfg: NetworkConfig, tol: TolerancePolicy = DEFAULT_TOL):
    """Per-pair achievable rates (R13, R14, R23, R24) for one design."""
    alloc = design.allocation
    p_stream, p_relay = stream_powers(alloc, cfg)
    sigma2 = cfg.noise_var

    detector = pseudo_inverse(design.mac_basis, tol)
    noise_gain = np.sum(np.abs(detector) ** 2, axis=1)
    slices = alloc.pair_slices()
    mac = {
        pair: float(np.sum(np.log2(1.0 + 2.0 * p_stream / (sigma2 * noise_gain[sl]))))
        for pair, sl in slices.items()
    }

    if isinstance(design, TransceiverDesign):
        bc = _bc_rates_aligned(design, p_relay, sigma2)
    elif isinstance(design, ReducedDesign):
        bc = _bc_rates_zero_forced(design, p_relay, sigma2, tol)
    else:
        raise TypeError(f"unsupported design type: {type(design).__name__}")

    return tuple(min(mac[pair], bc[pair]) for pair in PAIRS)


def sum_rate(design, cfg: NetworkConfig, tol: TolerancePolicy = DEFAULT_TOL) -> float:
    """Network sum rate: both directions of all four pairs."""
    return 2.0 * float(np.sum(instantaneous_rates(design, cfg, tol)))


def _bc_rates_aligned(design: TransceiverDesign, p_relay, sigma2):
    out = {}
    for pair, sl in design.allocation.pair_slices().items():
        d = sl.stop - sl.start
        if d == 0:
            out[pair] = 0.0
            continue
        t = design.effective_rows[sl, :] @ design.relay_beamformers[:, sl]
        gram = np.eye(d) + (p_relay / sigma2) * (t @ t.conj().T)
        out[pair] = float(np.linalg.slogdet(gram)[1] / math.log(2.0))
    return out


def _bc_rates_zero_forced(design: ReducedDesign, p_relay, sigma2, tol):
    alloc = design.allocation
    per_node = {}
    for node in (1, 2, 3, 4):
        if alloc.node_streams(node) == 0:
            continue
        t = node_effective_matrix(design, node)
        equalizer = np.linalg.solve(t, design.receive_filters[node])
        noise_gain = np.sum(np.abs(equalizer) ** 2, axis=1)
        rates = np.log2(1.0 + p_relay / (sigma2 * noise_gain))
        offset = 0
        for pair in node_pairs(node):
            d = alloc.for_pair(pair)
            per_node[(node, pair)] = float(np.sum(rates[offset : offset + d]))
            offset += d
    out = {}
    for pair in PAIRS:
        if alloc.for_pair(pair) == 0:
            out[pair] = 0.0
        else:
            i, j = pair
            out[pair] = min(per_node[(i, pair)], per_node[(j, pair)])
    return out


def _timeshare_sum_rate(ch, cfg: NetworkConfig) -> float:
    """Pair-at-a-time baseline: each slot runs one pair's two-way exchange.

    Both phases are min(M, N)-stream zero-forced MIMO links precoded along
    the channel's leading right singular vectors; the four slots are
    time-shared, so each pair's two directions carry weight 1/4.
    """
    m_streams = min(cfg.M, cfg.N)
    p = cfg.power_P / m_streams
    sigma2 = cfg.noise_var

    def zf_link_rate(h: np.ndarray) -> float:
        _, _, vh = np.linalg.svd(h, full_matrices=False)
        eff = h @ vh[:m_streams].conj().T
        detector = np.linalg.pinv(eff)
        noise_gain = np.sum(np.abs(detector) ** 2, axis=1)
        return float(np.sum(np.log2(1.0 + p / (sigma2 * noise_gain))))

    uplink = {i: zf_link_rate(ch.to_relay(i)) for i in (1, 2, 3, 4)}
    downlink = {i: zf_link_rate(ch.from_relay(i)) for i in (1, 2, 3, 4)}
    total = 0.0
    for i, j in PAIRS:
        total += min(uplink[i], downlink[j]) + min(uplink[j], downlink[i])
    return total / 4.0


def _check_feasible(cfg: NetworkConfig, scheme: str) -> None:
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}, expected one of {SCHEMES}")
    if scheme == "sajic":
        allocate_streams(cfg)
    elif scheme == "reduced":
        reduced_split_budget(cfg.M, cfg.N, allocate_streams(cfg))


def _trial_seed(master: int, *indices: int) -> int:
    ss = np.random.SeedSequence([int(master) & 0xFFFFFFFFFFFFFFFF, *indices])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def ergodic_sweep(
    cfg: NetworkConfig,
    scheme: str,
    snr_grid_db,
    trials: int,
    seed: int,
    tol: TolerancePolicy = DEFAULT_TOL,
) -> RateCurve:
    """Average sum rate over fresh channel draws at each SNR point.

    Sub-seeds derive deterministically from (seed, snr index, trial index,
    redraw count), so results are reproducible regardless of execution
    order.  Numerically degenerate draws are redrawn and counted.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    _check_feasible(cfg, scheme)
    snr_grid_db = [float(s) for s in snr_grid_db]

    points = []
    redraws = 0
    for snr_idx, snr_db in enumerate(snr_grid_db):
        power = cfg.noise_var * 10.0 ** (snr_db / 10.0)
        cfg_point = replace(cfg, power_P=power)
        samples = np.empty(trials)
        for trial in range(trials):
            for attempt in range(_MAX_REDRAWS):
                try:
                    ch = draw_channels(cfg_point, _trial_seed(seed, snr_idx, trial, attempt), tol)
                    samples[trial] = _evaluate(ch, cfg_point, scheme, tol)
                    break
                except RankDeficient:
                    redraws += 1
            else:
                raise RankDeficient(
                    f"{_MAX_REDRAWS} consecutive degenerate draws at snr index {snr_idx}"
                )
        mean = float(samples.mean())
        std_err = float(samples.std(ddof=1) / np.sqrt(trials)) if trials > 1 else 0.0
        points.append(RatePoint(snr_db, mean, trials, std_err))

    return RateCurve(
        scheme=scheme,
        M=cfg.M,
        N=cfg.N,
        points=tuple(points),
        fitted_slope_per_3db=fit_slope_per_3db(points),
        redraws=redraws,
    )


def _evaluate(ch, cfg_point, scheme, tol) -> float:
    if scheme == "sajic":
        return sum_rate(design_full(ch, cfg_point, tol), cfg_point, tol)
    if scheme == "reduced":
        return sum_rate(design_reduced(ch, cfg_point, tol), cfg_point, tol)
    return _timeshare_sum_rate(ch, cfg_point)


def timeshare_sweep(
    cfg: NetworkConfig,
    snr_grid_db,
    trials: int,
    seed: int,
    tol: TolerancePolicy = DEFAULT_TOL,
) -> RateCurve:
    """Ergodic sweep of the pair-at-a-time baseline."""
    return ergodic_sweep(cfg, "timeshare", snr_grid_db, trials, seed, tol)


def fit_slope_per_3db(points) -> float:
    """Least-squares rate slope per 3 dB over the top half of the SNR grid.

    The fit starts at index ``len // 2`` but always keeps at least two
    points; a single-point curve has no slope (NaN).
    """
    points = list(points)
    if len(points) < 2:
        return float("nan")
    top = points[min(len(points) // 2, len(points) - 2):]
    x = np.array([p.snr_db for p in top])
    y = np.array([p.mean_sum_rate for p in top])
    slope_per_db = np.polyfit(x, y, 1)[0]
    return float(3.0 * slope_per_db)
