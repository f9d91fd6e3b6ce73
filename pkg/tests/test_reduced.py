"""Relay-side nulling scheme: budgets, feasibility boundary, leakage."""

import numpy as np
import pytest

from xrelay import (
    DEFAULT_TOL,
    NetworkConfig,
    ReducedInfeasible,
    StreamAllocation,
    allocate_streams,
    design_reduced,
    diagnose,
    draw_channels,
    reduced_split_budget,
)
from xrelay.model import PAIRS
from xrelay.reduced import VICTIMS

RES = DEFAULT_TOL.residual_eps


class TestSplitBudget:
    def test_symmetric_case_sums_to_n_minus_m(self):
        splits = reduced_split_budget(3, 4, StreamAllocation(1, 1, 1, 1))
        d13_1, d14_1, d23_1, d24_1 = splits
        assert d23_1 + d24_1 == 1
        assert d13_1 + d14_1 == 1

    def test_no_nulling_needed_when_relay_small(self):
        assert reduced_split_budget(5, 5, StreamAllocation(1, 1, 2, 1)) == (0, 0, 0, 0)

    def test_infeasible_at_5_8(self):
        with pytest.raises(ReducedInfeasible):
            reduced_split_budget(5, 8, StreamAllocation(2, 2, 2, 2))

    def test_total_must_match(self):
        with pytest.raises(ValueError):
            reduced_split_budget(3, 4, StreamAllocation(1, 1, 1, 2))

    def test_matches_closed_form_over_grid(self):
        for m in range(1, 9):
            for n in range(1, 2 * m):
                if 5 * n > 8 * m:
                    continue  # full allocation unavailable
                alloc = allocate_streams(NetworkConfig(M=m, N=n))
                try:
                    reduced_split_budget(m, n, alloc)
                    feasible = True
                except ReducedInfeasible:
                    feasible = False
                assert feasible == (3 * n <= 4 * m), (m, n)


class TestDesignReduced:
    def test_3_4_has_eight_directed_streams(self):
        cfg = NetworkConfig(M=3, N=4)
        design = design_reduced(draw_channels(cfg, 0), cfg)
        assert 2 * design.allocation.total == 8
        assert design.allocation.relay_null_splits is not None

    def test_5_8_infeasible(self):
        cfg = NetworkConfig(M=5, N=8)
        with pytest.raises(ReducedInfeasible):
            design_reduced(draw_channels(cfg, 0), cfg)

    def test_victim_nulling_is_exact(self):
        cfg = NetworkConfig(M=6, N=8)
        design = design_reduced(draw_channels(cfg, 3), cfg)
        slices = design.allocation.pair_slices()
        for pair in PAIRS:
            nulled = design.nulled_counts[pair]
            assert nulled == 2  # N - M
            cols = design.relay_beamformers[:, slices[pair]][:, :nulled]
            h_victim = design.channel.from_relay(VICTIMS[pair])
            assert np.linalg.norm(h_victim @ cols) <= RES

    def test_free_dimension_accounting(self):
        # With M = 3N/4 each node's filter spans exactly its N/2 desired
        # dimensions after removing N/4 residual interference dimensions.
        cfg = NetworkConfig(M=6, N=8)
        design = design_reduced(draw_channels(cfg, 7), cfg)
        for node in (1, 2, 3, 4):
            assert design.receive_filters[node].shape == (4, 6)
        report = diagnose(design)
        assert report.nulling_budget == {1: 2, 2: 2, 3: 2, 4: 2}
        assert report.failures() == []

    @pytest.mark.parametrize("m,n", [(3, 4), (4, 4), (5, 6), (6, 8), (4, 5)])
    def test_invariants_across_seeds(self, m, n):
        cfg = NetworkConfig(M=m, N=n, power_P=2.0)
        for seed in range(25):
            design = design_reduced(draw_channels(cfg, seed), cfg)
            report = diagnose(design)
            assert report.failures() == [], (m, n, seed, report.failures())

    def test_feasibility_matches_construction(self):
        for m in range(1, 7):
            for n in range(1, 2 * m):
                cfg = NetworkConfig(M=m, N=n)
                succeeded = True
                try:
                    for seed in range(5):
                        design_reduced(draw_channels(cfg, seed), cfg)
                except ReducedInfeasible:
                    succeeded = False
                assert succeeded == (3 * n <= 4 * m), (m, n)

    def test_infeasible_beyond_relay_limit(self):
        cfg = NetworkConfig(M=2, N=4)  # N >= 2M
        with pytest.raises(ReducedInfeasible):
            design_reduced(draw_channels(cfg, 0), cfg)

    def test_stream_totals_match_joint_scheme_where_both_run(self):
        from xrelay import design_full

        for m, n in [(3, 4), (5, 6), (6, 8)]:
            cfg = NetworkConfig(M=m, N=n)
            ch = draw_channels(cfg, 11)
            assert (
                design_reduced(ch, cfg).allocation.total
                == design_full(ch, cfg).allocation.total
                == n
            )
