"""Monte-Carlo check of block advantage distillation on classical bit strings.

Only acceptance and error statistics are sampled; the eavesdropper's
information has no classical sampling analogue and is not estimated.

Blocks are processed in fixed-size chunks. Chunk ``k`` draws from its own
Philox stream keyed by ``(seed, k)``, so any partition of the chunks across
workers reproduces the sequential counts exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distill import ad_map_block
from .states import BellDiagonal, InvalidStateError, check_probability, qbers_from_lambdas

CHUNK_BLOCKS = 1 << 16


@dataclass(frozen=True)
class McConfig:
    q: float
    blocks: int
    b: int = 2
    seed: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "q", check_probability("q", self.q))
        if self.blocks < 1:
            raise ValueError("need at least one block")
        if self.b < 2:
            raise ValueError("advantage distillation needs block size b >= 2")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")

    @property
    def n_chunks(self) -> int:
        return -(-self.blocks // CHUNK_BLOCKS)


@dataclass(frozen=True)
class ChunkCounts:
    blocks: int
    accepted: int
    errors: int

    def __add__(self, other: ChunkCounts) -> ChunkCounts:
        return ChunkCounts(
            self.blocks + other.blocks,
            self.accepted + other.accepted,
            self.errors + other.errors,
        )


@dataclass(frozen=True)
class McStats:
    blocks: int
    accepted: int
    errors: int
    p_succ_hat: float
    qber_hat: float
    p_succ_se: float
    qber_se: float

    @classmethod
    def from_counts(cls, counts: ChunkCounts) -> McStats:
        p = counts.accepted / counts.blocks
        q = counts.errors / counts.accepted if counts.accepted else 0.0
        p_se = math.sqrt(p * (1 - p) / counts.blocks)
        q_se = math.sqrt(q * (1 - q) / counts.accepted) if counts.accepted else 0.0
        return cls(counts.blocks, counts.accepted, counts.errors, p, q, p_se, q_se)


def _generator(seed: int, chunk: int, stream: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(chunk, stream))))


def simulate_chunk(cfg: McConfig, chunk: int, transcript: bool = False) -> ChunkCounts:
    """Counts for blocks ``[chunk*CHUNK_BLOCKS, ...)`` of the run."""
    n = min(CHUNK_BLOCKS, cfg.blocks - chunk * CHUNK_BLOCKS)
    if n <= 0:
        raise ValueError(f"chunk {chunk} is past the end of the run")
    flips = _generator(cfg.seed, chunk).random((n, cfg.b)) < cfg.q
    if transcript:
        return _transcript_counts(cfg, chunk, flips)
    n_flips = flips.sum(axis=1)
    accepted = (n_flips == 0) | (n_flips == cfg.b)
    # An accepted block with every bit flipped keeps a wrong first bit.
    errors = n_flips == cfg.b
    return ChunkCounts(n, int(accepted.sum()), int(errors.sum()))


def _transcript_counts(cfg: McConfig, chunk: int, flips: np.ndarray) -> ChunkCounts:
    """Run the full exchange: Alice's bits, the mask r, the public c, Bob's check."""
    n = flips.shape[0]
    rng = _generator(cfg.seed, chunk, stream=1)
    alice = rng.integers(0, 2, size=(n, cfg.b), dtype=np.uint8)
    r = rng.integers(0, 2, size=(n, 1), dtype=np.uint8)
    bob = alice ^ flips.astype(np.uint8)
    c = alice ^ r
    masked = bob ^ c
    acc = np.all(masked == 0, axis=1) | np.all(masked == 1, axis=1)
    disagree = alice[:, 0] != bob[:, 0]
    return ChunkCounts(n, int(acc.sum()), int((acc & disagree).sum()))


def run_ad_mc(cfg: McConfig, transcript: bool = False) -> McStats:
    """Simulate ``cfg.blocks`` blocks; identical seeds give identical stats.

    With ``transcript`` each block is played out bit by bit (Alice's string,
    random mask, Bob's acceptance test); the error pattern is drawn from the
    same stream, so both modes yield the same counts.
    """
    total = ChunkCounts(0, 0, 0)
    for chunk in range(cfg.n_chunks):
        total = total + simulate_chunk(cfg, chunk, transcript)
    return McStats.from_counts(total)


@dataclass(frozen=True)
class McReport:
    q: float
    b: int
    blocks: int
    seed: int
    p_succ: float
    p_succ_hat: float
    p_succ_z: float
    qber: float
    qber_hat: float
    qber_z: float

    @property
    def passed(self) -> bool:
        return abs(self.p_succ_z) < 4 and abs(self.qber_z) < 4


def _z_score(observed: float, expected: float, sigma: float) -> float:
    if sigma > 0:
        return (observed - expected) / sigma
    return 0.0 if observed == expected else math.copysign(math.inf, observed - expected)


def compare_to_closed_form(cfg: McConfig, s: BellDiagonal, transcript: bool = False) -> McReport:
    """Empirical vs analytic acceptance rate and post-distillation QBER.

    ``s`` must already be in the key frame: its Z-basis QBER equals ``cfg.q``.
    Standard errors are those of the analytic binomial proportions.
    """
    q_key = qbers_from_lambdas(s).qz
    if abs(q_key - cfg.q) > 1e-12:
        raise InvalidStateError(f"state has key-basis QBER {q_key!r} but config uses q={cfg.q!r}")
    outcome = ad_map_block(s, cfg.b)
    p = outcome.p_succ
    q_after = outcome.out.l10 + outcome.out.l11
    stats = run_ad_mc(cfg, transcript)
    p_sigma = math.sqrt(p * (1 - p) / stats.blocks)
    q_sigma = math.sqrt(q_after * (1 - q_after) / stats.accepted) if stats.accepted else 0.0
    return McReport(
        cfg.q,
        cfg.b,
        cfg.blocks,
        cfg.seed,
        p,
        stats.p_succ_hat,
        _z_score(stats.p_succ_hat, p, p_sigma),
        q_after,
        stats.qber_hat,
        _z_score(stats.qber_hat, q_after, q_sigma),
    )
