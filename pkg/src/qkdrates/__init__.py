"""Asymptotic BB84 and six-state key rates under asymmetric noise.

Bell-diagonal state algebra, one-way and advantage-distillation key rates,
DEJMPS entanglement distillation with independent oracles, and a Monte-Carlo
check of the classical block protocol.
"""

from .distill import (
    DistillOutcome,
    ad_map_block,
    bell_index_oracle,
    dejmps,
    dense_two_copy_oracle,
    theorem1_check,
)
from .entropy import binary_entropy, entropy4
from .mc import McConfig, McStats, compare_to_closed_form, run_ad_mc
from .rates import (
    RateParams,
    RateResult,
    ad_rate_bb84,
    ad_rate_six_state,
    minimize_over_qy,
    qy_star,
    rate_bb84,
    rate_six_state,
)
from .states import (
    Basis,
    BellDiagonal,
    InvalidStateError,
    QberTriple,
    canonical_dejmps_order,
    entanglement_of_formation,
    highest_qber_basis,
    is_entangled,
    lambdas_from_qbers,
    permute_for_key_basis,
    qbers_from_lambdas,
    singlet_fidelity,
)

__version__ = "0.1.0"
