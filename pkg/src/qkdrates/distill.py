"""Two-way distillation maps on Bell-diagonal states.

``ad_map_block`` is the closed form used everywhere else. The two oracles below
compute the same map from scratch: ``bell_index_oracle`` by enumerating Bell
labels through the bilocal CNOT network, ``dense_two_copy_oracle`` by
conjugating an explicit 16x16 density matrix.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from .states import (
    Basis,
    BellDiagonal,
    InvalidStateError,
    canonical_dejmps_order,
    highest_qber_basis,
    qbers_from_lambdas,
)

MIN_P_SUCC = 1e-15
MAX_ORACLE_BLOCK = 8


@dataclass(frozen=True)
class DistillOutcome:
    """Acceptance probability and the normalised state kept on acceptance.

    ``out`` is None when ``p_succ`` is too small to normalise (no key).
    """

    p_succ: float
    out: BellDiagonal | None

    @property
    def defined(self) -> bool:
        return self.out is not None


def ad_map_arrays(l00, l01, l10, l11, b: int):
    """Closed-form block map on raw coefficients (floats or numpy arrays).

    Returns ``(p_succ, o00, o01, o10, o11)``. The block is accepted when all
    amplitude bits agree; the kept pair carries that amplitude bit and the
    parity of all phase bits, which gives the power sums below.
    """
    if b == 1:
        return 1.0, l00, l01, l10, l11
    u, v = l00 + l01, l00 - l01
    w, x = l10 + l11, l10 - l11
    ub, vb, wb, xb = u**b, v**b, w**b, x**b
    p = ub + wb
    two_p = 2 * p
    return p, (ub + vb) / two_p, (ub - vb) / two_p, (wb + xb) / two_p, (wb - xb) / two_p


def _outcome(p: float, coeffs) -> DistillOutcome:
    if p < MIN_P_SUCC:
        return DistillOutcome(float(p), None)
    return DistillOutcome(float(p), BellDiagonal.from_sequence(float(c) for c in coeffs))


def ad_map_block(s: BellDiagonal, b: int) -> DistillOutcome:
    """Advantage distillation on blocks of ``b`` pairs, key read out in Z."""
    if b < 1:
        raise ValueError(f"block size must be >= 1 (got {b})")
    if b == 1:
        return DistillOutcome(1.0, s)
    p, *coeffs = ad_map_arrays(*s.as_tuple(), b)
    return _outcome(p, coeffs)


def dejmps(s: BellDiagonal) -> DistillOutcome:
    canonical, _ = canonical_dejmps_order(s)
    return ad_map_block(canonical, 2)


@functools.lru_cache(maxsize=None)
def _label_tuples(b: int) -> np.ndarray:
    """All 4**b tuples of Bell labels, one column per copy."""
    grids = np.meshgrid(*([np.arange(4)] * b), indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


def bell_index_oracle(s: BellDiagonal, b: int) -> DistillOutcome:
    """Exhaustive enumeration of Bell labels through bilocal CNOTs.

    Copy 0 controls a CNOT onto every other copy. Per gate, the target's
    amplitude bit picks up the control's, and the control's phase bit picks up
    the target's. Targets are measured in Z and the block survives iff every
    target shows equal outcomes on both sides, i.e. amplitude bit 0.
    """
    if not 1 <= b <= MAX_ORACLE_BLOCK:
        raise ValueError(f"oracle enumerates 4**b tuples; need 1 <= b <= {MAX_ORACLE_BLOCK}")
    labels = _label_tuples(b)
    coeffs = np.array(s.as_tuple())
    weights = np.prod(coeffs[labels], axis=1)
    amp = labels >> 1
    phase = labels & 1
    for target in range(1, b):
        amp[:, target] ^= amp[:, 0]
        phase[:, 0] ^= phase[:, target]
    accepted = np.all(amp[:, 1:] == 0, axis=1)
    kept = 2 * amp[:, 0] + phase[:, 0]
    dist = np.bincount(kept[accepted], weights=weights[accepted], minlength=4)
    p = float(dist.sum())
    return _outcome(p, dist / p if p >= MIN_P_SUCC else dist)


_PAULI_I = np.eye(2)
_PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]])
_PAULI_Z = np.diag([1.0, -1.0])
_PHI_PLUS = np.array([1.0, 0.0, 0.0, 1.0]) / np.sqrt(2)


def bell_vectors() -> list[np.ndarray]:
    """``X^i Z^j (x) I |Phi+>`` in the (A, B) computational basis, ordered 00, 01, 10, 11."""
    vecs = []
    for i in (0, 1):
        for j in (0, 1):
            local = np.linalg.matrix_power(_PAULI_X, i) @ np.linalg.matrix_power(_PAULI_Z, j)
            vecs.append(np.kron(local, _PAULI_I) @ _PHI_PLUS)
    return vecs


def bell_diagonal_matrix(s: BellDiagonal) -> np.ndarray:
    return sum(c * np.outer(v, v) for c, v in zip(s.as_tuple(), bell_vectors()))


def _cnot() -> np.ndarray:
    return np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=float
    )


def dense_two_copy_oracle(s: BellDiagonal) -> DistillOutcome:
    """Two-copy density-matrix simulation of one DEJMPS round without rotation.

    Qubits are ordered A1 A2 B1 B2. Alice's CNOT has control A1 and target A2,
    Bob's control B1 and target B2. The targets are kept when their Z outcomes
    agree (00 or 11) and traced out.
    """
    rho = bell_diagonal_matrix(s)
    # rho (x) rho is ordered A1 B1 A2 B2; reorder to A1 A2 B1 B2.
    two = np.kron(rho, rho).reshape([2] * 8)
    two = two.transpose(0, 2, 1, 3, 4, 6, 5, 7).reshape(16, 16)

    cnots = np.kron(_cnot(), _cnot())
    two = cnots @ two @ cnots.T

    keep = np.zeros((16, 16))
    for m in (0, 1):
        proj = np.zeros((2, 2))
        proj[m, m] = 1.0
        keep += np.kron(np.kron(_PAULI_I, proj), np.kron(_PAULI_I, proj))
    kept = keep @ two @ keep
    p = float(np.trace(kept).real)

    # Partial trace over A2, B2 leaves the (A1, B1) pair.
    pair = np.einsum("axbycxdy->abcd", kept.reshape([2] * 8)).reshape(4, 4)
    coeffs = [float(v @ pair @ v) for v in bell_vectors()]
    if p < MIN_P_SUCC:
        return DistillOutcome(p, None)
    return _outcome(p, [c / p for c in coeffs])


@dataclass(frozen=True)
class Theorem1Check:
    rate_i: float
    rate_ii: float
    equal: bool
    qber_tie: bool


def theorem1_check(s: BellDiagonal, f: float = 1.0) -> Theorem1Check:
    """Compare block-2 advantage distillation in the highest-QBER basis with
    DEJMPS followed by a one-way six-state key."""
    from .rates import RateParams, ad_rate_six_state, rate_six_state

    if s.l00 <= 0.5:
        raise InvalidStateError(f"DEJMPS needs l00 > 1/2 (got {s.l00!r})")
    q = qbers_from_lambdas(s)
    key_basis = highest_qber_basis(q)
    top = q.qber(key_basis)
    tie = sum(abs(q.qber(beta) - top) <= 1e-12 for beta in Basis) > 1

    rate_i = ad_rate_six_state(s, RateParams(key_basis, block=2, f=f)).rate
    distilled = dejmps(s)
    rate_ii = 0.5 * distilled.p_succ * rate_six_state(distilled.out, RateParams(Basis.Z, f=f)).rate
    return Theorem1Check(rate_i, rate_ii, abs(rate_i - rate_ii) < 1e-10, tie)
