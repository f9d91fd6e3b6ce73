"""Bit-exact exchange: the constructive proof that interference is gone."""

import dataclasses

import numpy as np
import pytest

from xrelay import (
    DesignInvalid,
    MessageSet,
    NetworkConfig,
    design_full,
    design_reduced,
    draw_channels,
    run_exchange,
)
from xrelay.exchange import _pnc_demap


@pytest.fixture(scope="module")
def sajic_design():
    cfg = NetworkConfig(M=5, N=8)
    return design_full(draw_channels(cfg, 42), cfg)


class TestPncDemap:
    def test_three_level_mapping(self):
        # bit pairs (0,0)->+2, (1,1)->-2 give XOR 0; (0,1)/(1,0)->0 give XOR 1
        est = np.array([2.0, -2.0, 0.0, 1.9 + 0.05j, -0.1])
        assert _pnc_demap(est).tolist() == [0, 0, 1, 0, 1]


class TestNoiselessRecovery:
    def test_joint_scheme_5_8(self, sajic_design):
        for seed in range(20):
            msgs = MessageSet.random(sajic_design.allocation, seed)
            result = run_exchange(sajic_design, msgs, noise_var=0.0)
            assert result.relay_xor_errors == 0
            assert result.total_bit_errors == 0
            for key, bits in msgs.bits.items():
                assert np.array_equal(result.recovered.bits[key], bits)

    def test_reduced_scheme_3_4(self):
        cfg = NetworkConfig(M=3, N=4)
        design = design_reduced(draw_channels(cfg, 7), cfg)
        for seed in range(20):
            msgs = MessageSet.random(design.allocation, seed)
            result = run_exchange(design, msgs, noise_var=0.0)
            assert result.total_bit_errors == 0

    def test_all_zero_messages(self, sajic_design):
        msgs = MessageSet.zeros(sajic_design.allocation)
        result = run_exchange(msgs=msgs, design=sajic_design, noise_var=0.0)
        assert result.total_bit_errors == 0
        assert all(not bits.any() for bits in result.recovered.bits.values())

    def test_fresh_designs_many_shapes(self):
        for m, n in [(3, 4), (4, 6), (5, 9)]:
            cfg = NetworkConfig(M=m, N=n)
            for seed in range(50):
                design = design_full(draw_channels(cfg, seed), cfg)
                msgs = MessageSet.random(design.allocation, seed + 100)
                assert run_exchange(design, msgs, 0.0).total_bit_errors == 0


class TestRelayBlindness:
    def test_xor_equivalent_messages_give_identical_relay_output(self, sajic_design):
        # Flipping both directions of every pair preserves all XOR bits,
        # so a relay that only sees summed symbols must decode identically.
        base = MessageSet.random(sajic_design.allocation, 5)
        flipped = MessageSet({k: (1 - v).astype(np.int8) for k, v in base.bits.items()})
        r1 = run_exchange(sajic_design, base, 0.0)
        r2 = run_exchange(sajic_design, flipped, 0.0)
        assert r1.relay_xor_errors == r2.relay_xor_errors == 0
        for (i, j), bits in base.bits.items():
            xor_base = bits ^ base.bits[(j, i)]
            xor_flip = flipped.bits[(i, j)] ^ flipped.bits[(j, i)]
            assert np.array_equal(xor_base, xor_flip)

    def test_one_sided_swap_keeps_relay_output(self, sajic_design):
        # Moving a bit pattern from one direction to the other leaves the
        # XOR unchanged; both nodes' recoveries still succeed.
        alloc = sajic_design.allocation
        a = MessageSet.zeros(alloc)
        a.bits[(1, 3)][:] = [1, 0]
        b = MessageSet.zeros(alloc)
        b.bits[(3, 1)][:] = [1, 0]
        assert run_exchange(sajic_design, a, 0.0).total_bit_errors == 0
        assert run_exchange(sajic_design, b, 0.0).total_bit_errors == 0


class TestNoise:
    def test_deterministic_given_seed(self, sajic_design):
        msgs = MessageSet.random(sajic_design.allocation, 1)
        r1 = run_exchange(sajic_design, msgs, noise_var=0.5, seed=9)
        r2 = run_exchange(sajic_design, msgs, noise_var=0.5, seed=9)
        assert r1.node_bit_errors == r2.node_bit_errors
        assert r1.relay_xor_errors == r2.relay_xor_errors

    def test_error_rate_non_increasing_in_snr(self, sajic_design):
        # noise_var sweeps downward, i.e. SNR sweeps upward.
        rates = []
        for noise_var in (4.0, 1.0, 0.25, 0.01):
            errors = 0
            bits = 0
            for trial in range(60):
                msgs = MessageSet.random(sajic_design.allocation, trial)
                res = run_exchange(sajic_design, msgs, noise_var, seed=trial)
                errors += res.total_bit_errors
                bits += 16
            rates.append(errors / bits)
        tolerance = 0.03
        assert all(hi >= lo - tolerance for hi, lo in zip(rates, rates[1:]))
        assert rates[-1] < rates[0]

    def test_negative_noise_rejected(self, sajic_design):
        with pytest.raises(ValueError):
            run_exchange(sajic_design, MessageSet.zeros(sajic_design.allocation), -1.0)


class TestValidation:
    def test_tampered_design_is_rejected(self, sajic_design):
        rng = np.random.default_rng(0)
        bad = dataclasses.replace(
            sajic_design,
            relay_beamformers=rng.standard_normal(sajic_design.relay_beamformers.shape)
            + 0j,
        )
        with pytest.raises(DesignInvalid):
            run_exchange(bad, MessageSet.zeros(sajic_design.allocation), 0.0)

    def test_wrong_message_lengths_rejected(self, sajic_design):
        cfg = NetworkConfig(M=5, N=9)
        other = design_full(draw_channels(cfg, 0), cfg)
        msgs = MessageSet.zeros(other.allocation)
        with pytest.raises(ValueError):
            run_exchange(sajic_design, msgs, 0.0)
