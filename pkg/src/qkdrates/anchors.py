"""Published reference values and qualitative claims, checked end to end.

Each anchor returns an AnchorResult; ``qkdrates verify`` prints them as a
table and fails if any does not hold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from .distill import ad_map_block, dejmps
from .entropy import binary_entropy
from .mc import McConfig, compare_to_closed_form
from .rates import (
    RateParams,
    ad_rate_bb84,
    ad_rate_six_state,
    minimize_over_qy,
    qy_star,
    rate_bb84,
    rate_six_state,
)
from .scan import (
    RegionSummary,
    evaluate_six_state,
    frontier_distances,
    grid_values,
    scan1d,
    scan_region,
)
from .states import (
    Basis,
    QberTriple,
    entanglement_of_formation,
    highest_qber_basis,
    is_entangled,
    lambdas_from_qbers,
    permute_for_key_basis,
)

COUNTEREXAMPLE = QberTriple(0.39, 0.39, 0.01)
FIDELITY_TOL = 5e-4
FRONTIER_DISTANCE = 0.02


@dataclass(frozen=True)
class AnchorResult:
    name: str
    expected: str
    computed: str
    passed: bool


def _close(name: str, expected: float, computed: float, tol: float) -> AnchorResult:
    return AnchorResult(
        name, f"{expected:.6g} +- {tol:g}", f"{computed:.9g}", abs(computed - expected) <= tol
    )


def _holds(name: str, expected: str, computed: str, passed: bool) -> AnchorResult:
    return AnchorResult(name, expected, computed, bool(passed))


def initial_fidelity() -> AnchorResult:
    s = lambdas_from_qbers(COUNTEREXAMPLE)
    return _close("fidelity 0.605 of (0.39,0.39,0.01)", 0.605, s.l00, FIDELITY_TOL)


def ad_fidelity() -> AnchorResult:
    out = ad_map_block(lambdas_from_qbers(COUNTEREXAMPLE), 2)
    return _close("block-2 AD fidelity 0.525 (no rotation)", 0.525, out.out.l00, FIDELITY_TOL)


def dejmps_fidelity() -> AnchorResult:
    out = dejmps(lambdas_from_qbers(COUNTEREXAMPLE))
    return _close("DEJMPS fidelity 0.698", 0.698, out.out.l00, FIDELITY_TOL)


def counterexample_entangled() -> AnchorResult:
    ent = is_entangled(lambdas_from_qbers(COUNTEREXAMPLE))
    return _holds("(0.39,0.39,0.01) is entangled", "true", str(ent).lower(), ent)


def z_only_positive() -> AnchorResult:
    rates = {
        b: ad_rate_six_state(COUNTEREXAMPLE, RateParams(b, block=2)).rate for b in Basis
    }
    ok = rates[Basis.Z] > 0 and rates[Basis.X] <= 0 and rates[Basis.Y] <= 0
    shown = " ".join(f"{b.value}={r:.3e}" for b, r in rates.items())
    return _holds("six-state AD (0.39,0.39,0.01) Z-only-positive", "Z>0, X<=0, Y<=0", shown, ok)


def counterexample_one_way() -> AnchorResult:
    direct = rate_six_state(COUNTEREXAMPLE).rate
    after = ad_map_block(lambdas_from_qbers(COUNTEREXAMPLE), 2).out
    distilled = rate_six_state(after).rate
    return _holds(
        "(0.39,0.39,0.01) one-way: none before AD, positive after",
        "before<=0, after>0",
        f"before={direct:.3e} after={distilled:.3e}",
        direct <= 0 < distilled,
    )


def one_way_minimum() -> AnchorResult:
    def objective(qy):
        return rate_six_state(QberTriple(0.1, qy, 0.1)).rate

    qy, value = minimize_over_qy(objective, 0.0, 0.2)
    target = 1 - 2 * binary_entropy(0.1)
    ok = abs(qy - 0.18) <= 1e-3 and abs(value - target) <= 1e-4
    ok = ok and abs(rate_bb84(0.1, 0.1).rate - value) <= 1e-4
    return _holds(
        "one-way six-state minimum on (0.1,qy,0.1)",
        f"qy=0.18+-1e-3, R={target:.5f}+-1e-4 = BB84",
        f"qy={qy:.6f}, R={value:.6f}",
        ok,
    )


def qy_star_value() -> AnchorResult:
    return _close("worst-case qy at (0.1,0.1)", 0.18, qy_star(0.1, 0.1), 1e-12)


def bb84_threshold() -> AnchorResult:
    q = brentq(lambda q: rate_bb84(q, q).rate, 0.05, 0.2, xtol=1e-12)
    return _close("BB84 tolerates 11% QBER", 0.110, q, 1e-3)


def higher_qber_witness() -> AnchorResult:
    high = rate_six_state(QberTriple(0.1, 0.2, 0.1)).rate
    low = rate_six_state(QberTriple(0.098, 0.18, 0.098)).rate
    return _holds(
        "higher QBERs, higher rate: R(.1,.2,.1) > R(.098,.18,.098)",
        "R1 > R2",
        f"R1={high:.6f} R2={low:.6f}",
        high > low,
    )


def fidelity_monotone() -> AnchorResult:
    qys = np.linspace(0.0, 0.2, 201)
    states = [lambdas_from_qbers(QberTriple(0.1, qy, 0.1)) for qy in qys]
    fid = np.array([s.l00 for s in states])
    eof = np.array([entanglement_of_formation(s) for s in states])
    ok = bool(np.all(np.diff(fid) < 0) and np.all(np.diff(eof) < 0))
    return _holds(
        "fidelity and EoF decrease along (0.1,qy,0.1)", "strictly decreasing", str(ok).lower(), ok
    )


def ad_y_crossing() -> AnchorResult:
    qys = grid_values(0.0, 0.2, 0.001, open_interval=False)
    records = scan1d(0.1, 0.1, qys, block=2)
    diff = [r.rates[Basis.Y] - r.rates[Basis.Z] for r in records]
    crossings = [
        records[k].qy
        for k in range(1, len(records))
        if diff[k - 1] <= 0 < diff[k]
        and records[k].rates[Basis.Y] > 0
        and records[k].rates[Basis.Z] > 0
    ]
    ok = bool(crossings) and crossings[0] < 0.2
    return _holds(
        "AD on (0.1,qy,0.1): Y overtakes Z while both positive",
        "crossing below qy=0.2",
        f"crossing at qy={crossings[0]:.3f}" if crossings else "none",
        ok,
    )


def ad_highest_basis() -> AnchorResult:
    q = QberTriple(0.1, 0.2, 0.1)
    record = evaluate_six_state(q, "best", block=2)
    ok = highest_qber_basis(q) is Basis.Y and record.best_basis is Basis.Y
    return _holds(
        "(0.1,0.2,0.1) with AD: best basis is Y", "Y", record.best_basis.value, ok
    )


def bb84_ad_point() -> AnchorResult:
    z = ad_rate_bb84(0.05, 0.15, RateParams(Basis.Z, block=2)).rate
    x = ad_rate_bb84(0.05, 0.15, RateParams(Basis.X, block=2)).rate
    return _holds(
        "BB84 AD (0.05,0.15): higher-QBER Z beats X",
        "R_Z >= R_X",
        f"R_Z={z:.6f} R_X={x:.6f}",
        z >= x,
    )


def _region_anchor(step: float, protocol: str, block: int, qy_rule=None):
    values = grid_values(0.0, 0.5, step, open_interval=True)
    records = scan_region(values, protocol, qy_rule, block=block)
    return records, RegionSummary.from_records(records)


def bb84_region_b2(step: float) -> AnchorResult:
    records, summary = _region_anchor(step, "bb84", 2)
    dist = frontier_distances(records)
    worst = max(dist) if dist else 0.0
    ok = summary.inverted > 0 and worst <= FRONTIER_DISTANCE
    return _holds(
        f"BB84 AD b=2 grid {step:g}: inversions only near frontier",
        f"inverted>0, distance<={FRONTIER_DISTANCE}",
        f"inverted={summary.inverted}/{summary.positive} max distance={worst:.4f}",
        ok,
    )


def bb84_region_b7(step: float) -> AnchorResult:
    _, summary = _region_anchor(step, "bb84", 7)
    return _holds(
        f"BB84 AD b=7 grid {step:g}: higher-QBER basis always wins",
        "inverted=0",
        f"inverted={summary.inverted}/{summary.positive}",
        summary.inverted == 0 and summary.positive > 0,
    )


def rank3_region(step: float) -> AnchorResult:
    records, summary = _region_anchor(step, "six-state", 2, "rank3")
    not_y = sum(r.positive and r.best_basis is not Basis.Y for r in records)
    return _holds(
        f"rank-3 six-state AD grid {step:g}: Y always best",
        "non-Y winners=0",
        f"non-Y winners={not_y}/{summary.positive}",
        not_y == 0 and summary.positive > 0,
    )


def mc_counterexample(seed: int = 0) -> AnchorResult:
    s = lambdas_from_qbers(COUNTEREXAMPLE)
    report = compare_to_closed_form(McConfig(0.01, 10**6, 2, seed), s)
    return _holds(
        "Monte-Carlo acceptance at (0.39,0.39,0.01), p=0.9802",
        "|z|<4 for p_succ and QBER",
        f"p_hat={report.p_succ_hat:.5f} z_p={report.p_succ_z:.2f} z_q={report.qber_z:.2f}",
        report.passed and math.isclose(report.p_succ, 0.9802, abs_tol=1e-12),
    )


def inefficient_reconciliation() -> AnchorResult:
    q = QberTriple(0.05, 0.12, 0.1)
    one = [rate_six_state(q, RateParams(b)).rate for b in Basis]
    ineff = {b: rate_six_state(q, RateParams(b, f=1.2)).rate for b in Basis}
    best = max(Basis, key=lambda b: ineff[b])
    ok = max(one) - min(one) <= 1e-12 and best is Basis.X
    return _holds(
        "f=1 basis-independent; f=1.2 favours lowest QBER",
        "spread<=1e-12, best=X",
        f"spread={max(one) - min(one):.1e}, best={best.value}",
        ok,
    )


def key_basis_rotation() -> AnchorResult:
    s = permute_for_key_basis(lambdas_from_qbers(QberTriple(0.1, 0.2, 0.1)), Basis.Y)
    qz = s.l10 + s.l11
    return _close("Y-key rotation moves Q_Y into Z", 0.2, qz, 1e-12)


def all_anchors(region_step: float = 0.005) -> list[Callable[[], AnchorResult]]:
    return [
        initial_fidelity,
        ad_fidelity,
        dejmps_fidelity,
        counterexample_entangled,
        z_only_positive,
        counterexample_one_way,
        one_way_minimum,
        qy_star_value,
        bb84_threshold,
        higher_qber_witness,
        fidelity_monotone,
        ad_y_crossing,
        ad_highest_basis,
        bb84_ad_point,
        lambda: bb84_region_b2(region_step),
        lambda: bb84_region_b7(region_step),
        lambda: rank3_region(region_step),
        mc_counterexample,
        inefficient_reconciliation,
        key_basis_rotation,
    ]


def run_anchors(region_step: float = 0.005) -> list[AnchorResult]:
    return [anchor() for anchor in all_anchors(region_step)]
