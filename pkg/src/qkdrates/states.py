"""Bell-diagonal two-qubit states and their QBER parametrisation.

Coefficients are stored in the order (l00, l01, l10, l11), where ``lij`` is the
weight of ``X^i Z^j (x) I |Phi+>``. The first index is the amplitude (bit-flip)
bit and the second the phase bit, so a coefficient's position is ``2*i + j``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .entropy import binary_entropy

TOL = 1e-12


class InvalidStateError(ValueError):
    """QBERs or Bell coefficients that do not describe a quantum state."""


class Basis(str, enum.Enum):
    Z = "Z"
    X = "X"
    Y = "Y"

    @property
    def rank(self) -> int:
        """Position in the tie-break order Z < X < Y (lower wins ties)."""
        return TIE_BREAK_ORDER.index(self)


TIE_BREAK_ORDER = (Basis.Z, Basis.X, Basis.Y)


def check_probability(name: str, value: float) -> float:
    value = float(value)
    if math.isnan(value) or value < -TOL or value > 1 + TOL:
        raise InvalidStateError(f"{name}={value!r} is not a probability in [0, 1]")
    return min(max(value, 0.0), 1.0)


@dataclass(frozen=True)
class QberTriple:
    """Quantum bit error rates measured in the X, Y and Z bases."""

    qx: float
    qy: float
    qz: float

    def __post_init__(self) -> None:
        for name in ("qx", "qy", "qz"):
            object.__setattr__(self, name, check_probability(name, getattr(self, name)))

    def __iter__(self):
        return iter((self.qx, self.qy, self.qz))

    def qber(self, basis: Basis) -> float:
        return {Basis.X: self.qx, Basis.Y: self.qy, Basis.Z: self.qz}[Basis(basis)]

    def violations(self) -> list[str]:
        """Human-readable list of violated realizability inequalities (empty if realizable)."""
        qx, qy, qz = self.qx, self.qy, self.qz
        checks = [
            (qx + qy + qz <= 2 + 2 * TOL, f"qx + qy + qz <= 2 (got {qx + qy + qz:.12g})"),
            (qz <= qx + qy + 2 * TOL, f"qy >= qz - qx (got qy={qy:.12g}, qz - qx={qz - qx:.12g})"),
            (qx <= qy + qz + 2 * TOL, f"qy >= qx - qz (got qy={qy:.12g}, qx - qz={qx - qz:.12g})"),
            (qy <= qx + qz + 2 * TOL, f"qy <= qx + qz (got qy={qy:.12g}, qx + qz={qx + qz:.12g})"),
        ]
        return [msg for ok, msg in checks if not ok]

    @property
    def is_realizable(self) -> bool:
        return not self.violations()


@dataclass(frozen=True)
class BellDiagonal:
    """Coefficients of a Bell-diagonal state; nonnegative and summing to one."""

    l00: float
    l01: float
    l10: float
    l11: float

    def __post_init__(self) -> None:
        names = ("l00", "l01", "l10", "l11")
        total = math.fsum(float(getattr(self, name)) for name in names)
        if not abs(total - 1.0) <= TOL:
            raise InvalidStateError(f"Bell coefficients sum to {total!r}, not 1")
        for name in names:
            object.__setattr__(self, name, check_probability(name, getattr(self, name)))

    @classmethod
    def from_sequence(cls, values) -> BellDiagonal:
        l00, l01, l10, l11 = values
        return cls(l00, l01, l10, l11)

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.l00, self.l01, self.l10, self.l11)

    def __iter__(self):
        return iter(self.as_tuple())


def as_bell_diagonal(state: BellDiagonal | QberTriple) -> BellDiagonal:
    """Accept either representation; QBER triples are converted."""
    if isinstance(state, BellDiagonal):
        return state
    if isinstance(state, QberTriple):
        return lambdas_from_qbers(state)
    raise TypeError(f"expected BellDiagonal or QberTriple, got {type(state).__name__}")


def lambdas_from_qbers(q: QberTriple) -> BellDiagonal:
    problems = q.violations()
    if problems:
        raise InvalidStateError("QBER triple is not realizable: " + "; ".join(problems))
    qx, qy, qz = q
    return BellDiagonal(
        1 - (qx + qy + qz) / 2,
        (qx + qy - qz) / 2,
        (-qx + qy + qz) / 2,
        (qx - qy + qz) / 2,
    )


def qbers_from_lambdas(s: BellDiagonal) -> QberTriple:
    return QberTriple(s.l01 + s.l11, s.l01 + s.l10, s.l10 + s.l11)


def is_entangled(s: BellDiagonal) -> bool:
    return max(s.as_tuple()) > 0.5


def permute_for_key_basis(s: BellDiagonal, basis: Basis) -> BellDiagonal:
    """Rotate ``s`` so that measuring ``basis`` becomes a Z measurement.

    The returned state's QBER in Z equals the QBER of ``s`` in ``basis``.
    """
    basis = Basis(basis)
    l00, l01, l10, l11 = s.as_tuple()
    if basis is Basis.X:
        return BellDiagonal(l00, l10, l01, l11)
    if basis is Basis.Y:
        return BellDiagonal(l00, l11, l10, l01)
    return s


@dataclass(frozen=True)
class DejmpsOrder:
    """How ``canonical_dejmps_order`` rearranged a state.

    ``source[k]`` is the input position whose coefficient ended up in output
    position ``k``; ``key_basis`` is the input basis that plays the Z role.
    """

    source: tuple[int, int, int, int]
    key_basis: Basis


# Input position excluded from the Z-basis QBER of the canonical state -> basis.
_EXCLUDED_TO_BASIS = {1: Basis.Z, 2: Basis.X, 3: Basis.Y}
# Among equal coefficients the last sorted one lands in slot 01, i.e. defines the
# Z role, so this ranking reproduces the Z < X < Y tie-break of highest_qber_basis.
_SLOT_PREFERENCE = {3: 0, 2: 1, 1: 2}


def canonical_dejmps_order(s: BellDiagonal) -> tuple[BellDiagonal, DejmpsOrder]:
    """Keep l00 and sort the other three coefficients descending into (10, 11, 01)."""
    if s.l00 <= 0.5:
        raise InvalidStateError(f"canonical form requires l00 > 1/2 (got {s.l00!r})")
    values = s.as_tuple()
    ranked = sorted((1, 2, 3), key=lambda k: (-values[k], _SLOT_PREFERENCE[k]))
    i10, i11, i01 = ranked
    out = BellDiagonal(values[0], values[i01], values[i10], values[i11])
    return out, DejmpsOrder((0, i01, i10, i11), _EXCLUDED_TO_BASIS[i01])


def singlet_fidelity(s: BellDiagonal) -> float:
    return s.l00


def entanglement_of_formation(s: BellDiagonal) -> float:
    """Entanglement of formation in bits, defined here for l00 > 1/2 only."""
    if s.l00 <= 0.5:
        raise InvalidStateError(
            f"entanglement of formation formula needs l00 > 1/2 (got {s.l00!r})"
        )
    return binary_entropy(0.5 + math.sqrt(s.l00 * (1 - s.l00)))


def highest_qber_basis(q: QberTriple) -> Basis:
    """Basis with the largest QBER; ties go to Z, then X, then Y."""
    best = TIE_BREAK_ORDER[0]
    for basis in TIE_BREAK_ORDER[1:]:
        if q.qber(basis) > q.qber(best):
            best = basis
    return best
