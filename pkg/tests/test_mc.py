import math
from functools import reduce
from operator import add

import pytest

from qkdrates.mc import (
    CHUNK_BLOCKS,
    ChunkCounts,
    McConfig,
    McStats,
    compare_to_closed_form,
    run_ad_mc,
    simulate_chunk,
)
from qkdrates.states import Basis, BellDiagonal, InvalidStateError, permute_for_key_basis


def within(stats_value, expected, n, sigmas=4.0):
    se = math.sqrt(expected * (1 - expected) / n)
    return abs(stats_value - expected) <= sigmas * se


class TestConfig:
    @pytest.mark.parametrize(
        "kwargs",
        [
            {"q": 0.1, "blocks": 0},
            {"q": 0.1, "blocks": 10, "b": 1},
            {"q": 1.5, "blocks": 10},
            {"q": 0.1, "blocks": 10, "seed": -1},
            {"q": 0.1, "blocks": 10, "seed": 2**64},
        ],
    )
    def test_rejects(self, kwargs):
        with pytest.raises(ValueError):
            McConfig(**kwargs)

    def test_chunks(self):
        assert McConfig(0.1, 1).n_chunks == 1
        assert McConfig(0.1, CHUNK_BLOCKS).n_chunks == 1
        assert McConfig(0.1, CHUNK_BLOCKS + 1).n_chunks == 2


class TestRun:
    def test_noiseless(self):
        stats = run_ad_mc(McConfig(0.0, 1000, 3))
        assert stats.p_succ_hat == 1 and stats.qber_hat == 0

    def test_half(self):
        stats = run_ad_mc(McConfig(0.5, 10**6, 2, seed=1))
        assert within(stats.p_succ_hat, 0.5, stats.blocks)

    def test_q_point_one(self):
        stats = run_ad_mc(McConfig(0.1, 10**6, 2, seed=2))
        assert within(stats.p_succ_hat, 0.82, stats.blocks)
        assert within(stats.qber_hat, 0.01 / 0.82, stats.accepted)

    def test_counts_are_consistent(self):
        stats = run_ad_mc(McConfig(0.3, 200_000, 3, seed=3))
        assert 0 <= stats.errors <= stats.accepted <= stats.blocks == 200_000
        assert stats.p_succ_hat == stats.accepted / stats.blocks

    def test_reproducible(self):
        cfg = McConfig(0.1, 300_000, 3, seed=42)
        assert run_ad_mc(cfg) == run_ad_mc(cfg)
        assert run_ad_mc(cfg) != run_ad_mc(McConfig(0.1, 300_000, 3, seed=43))

    def test_chunk_order_independent(self):
        cfg = McConfig(0.2, 5 * CHUNK_BLOCKS + 123, 2, seed=7)
        chunks = [simulate_chunk(cfg, k) for k in reversed(range(cfg.n_chunks))]
        total = reduce(add, chunks, ChunkCounts(0, 0, 0))
        assert McStats.from_counts(total) == run_ad_mc(cfg)

    def test_prefix_stability(self):
        # The first chunks of a longer run equal a shorter run of whole chunks.
        short = McConfig(0.2, 2 * CHUNK_BLOCKS, 2, seed=9)
        long = McConfig(0.2, 3 * CHUNK_BLOCKS, 2, seed=9)
        assert simulate_chunk(short, 1) == simulate_chunk(long, 1)

    def test_chunk_past_end(self):
        with pytest.raises(ValueError):
            simulate_chunk(McConfig(0.1, 10), 1)

    @pytest.mark.parametrize("q, b", [(0.1, 2), (0.25, 3), (0.4, 7)])
    def test_transcript_mode_matches(self, q, b):
        cfg = McConfig(q, 10**4, b, seed=11)
        assert run_ad_mc(cfg, transcript=True) == run_ad_mc(cfg)


class TestCompare:
    def test_noiseless(self):
        report = compare_to_closed_form(McConfig(0.0, 1000), BellDiagonal(1, 0, 0, 0))
        assert report.p_succ_z == 0 and report.qber_z == 0 and report.passed

    def test_y_rotated_state(self):
        s = permute_for_key_basis(BellDiagonal(0.8, 0.1, 0.1, 0), Basis.Y)
        report = compare_to_closed_form(McConfig(0.2, 10**6, 2, seed=5), s)
        assert report.p_succ == pytest.approx(0.68, abs=1e-12)
        assert report.passed

    def test_counterexample(self, counterexample):
        report = compare_to_closed_form(McConfig(0.01, 10**6, 2, seed=0), counterexample)
        assert report.p_succ == pytest.approx(0.9802, abs=1e-12)
        assert report.qber == pytest.approx(0.0001 / 0.9802, abs=1e-12)
        assert report.passed

    def test_transcript(self, counterexample):
        report = compare_to_closed_form(McConfig(0.01, 10**5, 2), counterexample, transcript=True)
        assert report.passed

    def test_rejects_mismatch(self, counterexample):
        with pytest.raises(InvalidStateError):
            compare_to_closed_form(McConfig(0.39, 100), counterexample)

    def test_detects_wrong_rate(self):
        # A state whose key QBER disagrees with the sampled error rate gives huge z.
        cfg = McConfig(0.1, 10**5, 2, seed=1)
        biased = McConfig(0.12, 10**5, 2, seed=1)
        report = compare_to_closed_form(cfg, BellDiagonal(0.9, 0, 0.1, 0))
        assert report.passed
        stats = run_ad_mc(biased)
        assert abs(stats.p_succ_hat - report.p_succ) / math.sqrt(report.p_succ * (1 - report.p_succ) / 10**5) > 4
