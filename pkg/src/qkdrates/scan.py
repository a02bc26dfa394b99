"""Point evaluations and parameter sweeps behind the CLI.

A ScanRecord holds the key rate of every key basis the protocol allows at one
QBER point, plus the winning basis. Missing rates (Y for BB84, or bases not
requested) are None.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .rates import (
    BB84_BASES,
    GRID_POINTS,
    RateParams,
    ad_rate_bb84,
    ad_rate_six_state,
    rate_bb84,
    worst_case_rate,
)
from .states import (
    TIE_BREAK_ORDER,
    Basis,
    InvalidStateError,
    QberTriple,
    entanglement_of_formation,
    is_entangled,
    lambdas_from_qbers,
)

PROTOCOLS = ("six-state", "bb84")
# Rates closer than this count as equal when picking a winner.
RATE_TIE = 1e-12
# A lower-QBER basis must beat the higher-QBER one by this much to count as an
# inversion; it is above the minimiser's 1e-9 accuracy in value.
INVERSION_TOL = 1e-9


@dataclass(frozen=True)
class ScanRecord:
    qx: float
    qy: float | None
    qz: float
    rates: dict = field(default_factory=dict)  # Basis -> rate
    p_succ: dict = field(default_factory=dict)  # Basis -> acceptance probability
    valid: bool = True
    entangled: bool = False
    fidelity: float | None = None
    eof: float | None = None

    @property
    def best_basis(self) -> Basis | None:
        if not self.rates:
            return None
        top = max(self.rates.values())
        for basis in TIE_BREAK_ORDER:
            if basis in self.rates and self.rates[basis] >= top - RATE_TIE:
                return basis
        raise AssertionError("unreachable")

    @property
    def best_rate(self) -> float | None:
        basis = self.best_basis
        return None if basis is None else self.rates[basis]

    @property
    def best_p_succ(self) -> float | None:
        basis = self.best_basis
        return None if basis is None else self.p_succ[basis]

    def qber(self, basis: Basis) -> float:
        return {Basis.X: self.qx, Basis.Y: self.qy, Basis.Z: self.qz}[basis]

    @property
    def positive(self) -> bool:
        return self.valid and self.best_rate is not None and self.best_rate > 0

    @property
    def inverted(self) -> bool:
        """Positive-rate point where a strictly lower-QBER basis gives the higher rate."""
        if not self.positive or len(self.rates) < 2:
            return False
        top_q = max(self.qber(b) for b in self.rates)
        top = [r for b, r in self.rates.items() if self.qber(b) >= top_q - 1e-12]
        others = [r for b, r in self.rates.items() if self.qber(b) < top_q - 1e-12]
        return bool(others) and max(others) > max(top) + INVERSION_TOL


def _bases(protocol: str, basis: str) -> tuple[Basis, ...]:
    allowed = BB84_BASES if protocol == "bb84" else TIE_BREAK_ORDER
    if basis == "best":
        return tuple(b for b in TIE_BREAK_ORDER if b in allowed)
    chosen = Basis(basis)
    if chosen not in allowed:
        raise ValueError(f"basis {chosen.value} is not available in {protocol}")
    return (chosen,)


def _with_state_info(record: ScanRecord, q: QberTriple) -> ScanRecord:
    s = lambdas_from_qbers(q)
    eof = entanglement_of_formation(s) if s.l00 > 0.5 else None
    return ScanRecord(
        q.qx, q.qy, q.qz, record.rates, record.p_succ, True, is_entangled(s), s.l00, eof
    )


def evaluate_six_state(q: QberTriple, basis: str = "best", block: int = 1, f: float = 1.0) -> ScanRecord:
    """Six-state rates at a fully specified QBER triple."""
    lambdas_from_qbers(q)  # raises on unrealizable input
    rates, p_succ = {}, {}
    for b in _bases("six-state", basis):
        result = ad_rate_six_state(q, RateParams(b, block, f))
        rates[b], p_succ[b] = result.rate, result.p_succ
    return _with_state_info(ScanRecord(q.qx, q.qy, q.qz, rates, p_succ), q)


def evaluate_bb84(
    qx: float, qz: float, basis: str = "best", block: int = 1, f: float = 1.0,
    grid_points: int = GRID_POINTS,
) -> ScanRecord:
    """BB84 rates with the unobserved qy set to its worst case per basis.

    The reported qy is the worst case of the winning basis.
    """
    rates, p_succ, worst_qy = {}, {}, {}
    for b in _bases("bb84", basis):
        params = RateParams(b, block, f)
        if block == 1:
            result = rate_bb84(qx, qz, params)
        else:
            result = ad_rate_bb84(qx, qz, params, grid_points)
        rates[b], p_succ[b], worst_qy[b] = result.rate, result.p_succ, result.qy
    record = ScanRecord(qx, None, qz, rates, p_succ)
    return _with_state_info(record, QberTriple(qx, worst_qy[record.best_basis], qz))


def evaluate_six_state_worst(
    qx: float, qz: float, basis: str = "best", block: int = 1, f: float = 1.0,
    grid_points: int = GRID_POINTS,
) -> ScanRecord:
    """Six-state rates with qy minimised separately for each key basis."""
    rates, p_succ, worst_qy = {}, {}, {}
    for b in _bases("six-state", basis):
        result = worst_case_rate(qx, qz, RateParams(b, block, f), grid_points)
        rates[b], p_succ[b], worst_qy[b] = result.rate, result.p_succ, result.qy
    record = ScanRecord(qx, None, qz, rates, p_succ)
    return _with_state_info(record, QberTriple(qx, worst_qy[record.best_basis], qz))


def parse_qy_rule(rule: str):
    """``rank3`` (qy = qx + qz), ``worst``, or a fixed number."""
    if rule in ("rank3", "worst"):
        return rule
    try:
        return check_fixed_qy(float(rule))
    except ValueError:
        raise ValueError(f"qy rule must be 'rank3', 'worst' or a number, got {rule!r}") from None


def check_fixed_qy(value: float) -> float:
    if not 0 <= value <= 1:
        raise ValueError(f"fixed qy must lie in [0, 1], got {value}")
    return value


def evaluate_region_point(
    qx: float, qz: float, protocol: str, qy_rule=None, basis: str = "best",
    block: int = 1, f: float = 1.0, grid_points: int = GRID_POINTS,
) -> ScanRecord:
    if protocol == "bb84":
        return evaluate_bb84(qx, qz, basis, block, f, grid_points)
    if qy_rule is None:
        raise ValueError("six-state region scans need an explicit qy rule")
    if qy_rule == "worst":
        return evaluate_six_state_worst(qx, qz, basis, block, f, grid_points)
    qy = qx + qz if qy_rule == "rank3" else qy_rule
    try:
        return evaluate_six_state(QberTriple(qx, qy, qz), basis, block, f)
    except InvalidStateError:
        return ScanRecord(qx, qy, qz, valid=False)


def grid_values(lo: float, hi: float, step: float, *, open_interval: bool) -> list[float]:
    """Points ``lo + k*step`` inside the interval, rounded to suppress drift."""
    if not step > 0:
        raise ValueError("step must be positive")
    if hi < lo:
        raise ValueError(f"empty range [{lo}, {hi}]")
    digits = max(0, -math.floor(math.log10(step))) + 6
    n_max = math.floor((hi - lo) / step + 1e-9)
    values = [round(lo + k * step, digits) for k in range(n_max + 1)]
    if open_interval:
        values = [v for v in values if lo + 1e-12 < v < hi - 1e-12]
    return values


def scan1d(
    qx: float, qz: float, qy_values: Iterable[float], basis: str = "best",
    block: int = 1, f: float = 1.0,
) -> list[ScanRecord]:
    """Six-state rates along a family of fixed qx, qz; unrealizable points are flagged."""
    records = []
    for qy in sorted(qy_values):
        try:
            records.append(evaluate_six_state(QberTriple(qx, qy, qz), basis, block, f))
        except InvalidStateError:
            records.append(ScanRecord(qx, qy, qz, valid=False))
    return records


def scan_region(
    values: Sequence[float], protocol: str, qy_rule=None, basis: str = "best",
    block: int = 1, f: float = 1.0, grid_points: int = GRID_POINTS,
) -> list[ScanRecord]:
    """Evaluate every (qx, qz) on the square grid ``values`` x ``values``, row-major in qx."""
    return [
        evaluate_region_point(qx, qz, protocol, qy_rule, basis, block, f, grid_points)
        for qx in values
        for qz in values
    ]


@dataclass(frozen=True)
class RegionSummary:
    points: int
    positive: int
    higher_qber_wins: int
    inverted: int

    @classmethod
    def from_records(cls, records: Sequence[ScanRecord]) -> RegionSummary:
        positive = [r for r in records if r.positive]
        inverted = sum(r.inverted for r in positive)
        return cls(len(records), len(positive), len(positive) - inverted, inverted)


def frontier_distances(records: Sequence[ScanRecord]) -> list[float]:
    """Distance from each inverted point to the nearest valid zero-rate grid point."""
    dead = np.array(
        [(r.qx, r.qz) for r in records if r.valid and r.best_rate is not None and r.best_rate <= 0]
    )
    out = []
    for r in records:
        if r.inverted:
            out.append(float(np.min(np.hypot(dead[:, 0] - r.qx, dead[:, 1] - r.qz))) if len(dead) else math.inf)
    return out
