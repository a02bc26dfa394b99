"""Asymptotic key rates of the six-state and BB84 protocols.

Every rate is quoted per raw-key bit consumed. With reconciliation efficiency
``f`` the leakage is ``f*h(Q)`` for key-basis QBER ``Q`` while the
eavesdropper's term ``H(lambda) - h(Q)`` is left unchanged, so::

    R = (p_succ / b) * (1 - f*h(Q) - (H(lambda) - h(Q)))

evaluated on the state after advantage distillation (``b = 1`` means none).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .distill import ad_map_arrays, ad_map_block
from .entropy import binary_entropy, entropy4, neg_xlog2x
from .states import (
    Basis,
    BellDiagonal,
    QberTriple,
    as_bell_diagonal,
    check_probability,
    permute_for_key_basis,
)

__all__ = [
    "GRID_POINTS",
    "RateParams",
    "RateResult",
    "ad_rate_bb84",
    "ad_rate_six_state",
    "binary_entropy",
    "entropy4",
    "golden_section",
    "minimize_over_qy",
    "qy_interval",
    "qy_star",
    "rate_bb84",
    "rate_six_state",
    "worst_case_rate",
]

GRID_POINTS = 2001
BB84_BASES = (Basis.Z, Basis.X)


@dataclass(frozen=True)
class RateParams:
    basis: Basis = Basis.Z
    block: int = 1
    f: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "basis", Basis(self.basis))
        if int(self.block) != self.block or self.block < 1:
            raise ValueError(f"block size must be a positive integer (got {self.block!r})")
        if not self.f >= 1:
            raise ValueError(f"reconciliation efficiency f must be >= 1 (got {self.f!r})")


@dataclass(frozen=True)
class RateResult:
    rate: float
    p_succ: float = 1.0
    post_ad_state: BellDiagonal | None = None
    qy: float | None = None  # worst-case Y-basis QBER for BB84 results

    @property
    def rate_clamped(self) -> float:
        return max(self.rate, 0.0)


def key_frame(l00, l01, l10, l11, basis: Basis):
    """Raw-coefficient version of ``permute_for_key_basis``."""
    if basis is Basis.X:
        return l00, l10, l01, l11
    if basis is Basis.Y:
        return l00, l11, l10, l01
    return l00, l01, l10, l11


def rate_kernel(l00, l01, l10, l11, b: int, f: float):
    """Key rate of coefficients already in the key frame; floats or arrays.

    Returns ``(rate, p_succ)``.
    """
    p, o00, o01, o10, o11 = ad_map_arrays(l00, l01, l10, l11, b)
    h_total = neg_xlog2x(o00) + neg_xlog2x(o01) + neg_xlog2x(o10) + neg_xlog2x(o11)
    loss = h_total
    if f != 1:
        q = o10 + o11
        loss = loss + (f - 1) * (neg_xlog2x(q) + neg_xlog2x(1 - q))
    return p * (1 - loss) / b, p


def _qber_kernel(qx, qy, qz, basis: Basis, b: int, f: float):
    l00 = 1 - (qx + qy + qz) / 2
    l01 = (qx + qy - qz) / 2
    l10 = (-qx + qy + qz) / 2
    l11 = (qx - qy + qz) / 2
    return rate_kernel(*key_frame(l00, l01, l10, l11, basis), b, f)[0]


def rate_six_state(state: BellDiagonal | QberTriple, params: RateParams = RateParams()) -> RateResult:
    """One-way six-state rate; with ``f = 1`` this is ``1 - H(lambda)`` in any basis."""
    if params.block != 1:
        raise ValueError("rate_six_state is the one-way rate; use ad_rate_six_state for block > 1")
    return ad_rate_six_state(state, params)


def ad_rate_six_state(state: BellDiagonal | QberTriple, params: RateParams) -> RateResult:
    s = permute_for_key_basis(as_bell_diagonal(state), params.basis)
    outcome = ad_map_block(s, params.block)
    if not outcome.defined:
        return RateResult(0.0, outcome.p_succ, None)
    rate, _ = rate_kernel(*outcome.out.as_tuple(), 1, params.f)
    rate = outcome.p_succ * rate / params.block
    return RateResult(rate, outcome.p_succ, outcome.out if params.block > 1 else None)


def _check_pair(qx: float, qz: float) -> tuple[float, float]:
    return check_probability("qx", qx), check_probability("qz", qz)


def qy_interval(qx: float, qz: float) -> tuple[float, float]:
    """Y-basis QBERs compatible with a positive semidefinite state."""
    qx, qz = _check_pair(qx, qz)
    return abs(qx - qz), min(qx + qz, 2 - qx - qz)


def qy_star(qx: float, qz: float) -> float:
    """Y-basis QBER minimising the one-way six-state rate at fixed qx, qz."""
    qx, qz = _check_pair(qx, qz)
    return qx + qz - 2 * qx * qz


def _bb84_basis(basis: Basis) -> Basis:
    basis = Basis(basis)
    if basis not in BB84_BASES:
        raise ValueError("BB84 generates key in the X or Z basis only")
    return basis


def rate_bb84(qx: float, qz: float, params: RateParams = RateParams()) -> RateResult:
    """Closed-form BB84 rate ``1 - f*h(Q_key) - h(Q_test)``, worst case over qy."""
    if params.block != 1:
        raise ValueError("rate_bb84 is the one-way rate; use ad_rate_bb84 for block > 1")
    qx, qz = _check_pair(qx, qz)
    if _bb84_basis(params.basis) is Basis.Z:
        q_key, q_test = qz, qx
    else:
        q_key, q_test = qx, qz
    rate = 1 - params.f * binary_entropy(q_key) - binary_entropy(q_test)
    return RateResult(rate, 1.0, None, qy_star(qx, qz))


def ad_rate_bb84(
    qx: float, qz: float, params: RateParams, grid_points: int = GRID_POINTS
) -> RateResult:
    """BB84 rate with advantage distillation: numerical worst case over qy."""
    _bb84_basis(params.basis)
    return worst_case_rate(qx, qz, params, grid_points)


def worst_case_rate(
    qx: float, qz: float, params: RateParams, grid_points: int = GRID_POINTS
) -> RateResult:
    """Six-state rate minimised over every admissible qy, for any key basis.

    Holds the minimising qy in ``RateResult.qy``.
    """
    lo, hi = qy_interval(qx, qz)
    qx, qz = float(qx), float(qz)
    basis, b, f = params.basis, params.block, params.f

    def objective(qy):
        return _qber_kernel(qx, qy, qz, basis, b, f)

    qy, _ = minimize_over_qy(objective, lo, hi, grid_points=grid_points, vectorized=True)
    qy = min(max(qy, lo), hi)
    result = ad_rate_six_state(QberTriple(qx, qy, qz), params)
    return RateResult(result.rate, result.p_succ, result.post_ad_state, qy)


def golden_section(
    objective: Callable[[float], float], lo: float, hi: float, xtol: float = 1e-10
) -> tuple[float, float]:
    """Local minimum of a unimodal function on [lo, hi]."""
    inv_phi = (math.sqrt(5) - 1) / 2
    a, b = lo, hi
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = objective(c), objective(d)
    while b - a > xtol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = objective(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = objective(d)
    return (c, fc) if fc <= fd else (d, fd)


def minimize_over_qy(
    objective: Callable,
    lo: float,
    hi: float,
    grid_points: int = GRID_POINTS,
    vectorized: bool = False,
    refine: int = 3,
) -> tuple[float, float]:
    """Global minimum of a possibly non-convex function on [lo, hi].

    The objective is sampled on ``grid_points`` evenly spaced points and each
    of the ``refine`` best samples is polished by golden-section search within
    its neighbouring grid cells. Set ``vectorized`` if the objective accepts a
    numpy array for the grid pass; refinement always calls it with floats.
    """
    if hi < lo:
        raise ValueError(f"empty interval [{lo}, {hi}]")
    if hi - lo <= 1e-15 or grid_points < 2:
        x = 0.5 * (lo + hi)
        return x, float(objective(x))

    grid = np.linspace(lo, hi, grid_points)
    if vectorized:
        values = np.asarray(objective(grid), dtype=float)
    else:
        values = np.array([objective(float(x)) for x in grid])

    best_x, best_v = float(grid[0]), float(values[0])
    for i in np.argsort(values, kind="stable")[:refine]:
        left = float(grid[max(i - 1, 0)])
        right = float(grid[min(i + 1, grid_points - 1)])
        candidates = [(float(grid[i]), float(values[i])), golden_section(objective, left, right)]
        for x, v in candidates:
            if v < best_v:
                best_x, best_v = x, float(v)
    return best_x, best_v
