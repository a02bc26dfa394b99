import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from qkdrates.states import BellDiagonal


def random_states(n: int, seed: int, min_l00: float = 0.0) -> list[BellDiagonal]:
    """Dirichlet-distributed Bell-diagonal states, optionally with l00 > min_l00."""
    rng = np.random.default_rng(seed)
    states = []
    while len(states) < n:
        c = rng.dirichlet([1.0, 1.0, 1.0, 1.0])
        if min_l00:
            l00 = rng.uniform(min_l00, 1.0)
            c = np.concatenate([[l00], (1 - l00) * rng.dirichlet([1.0, 1.0, 1.0])])
            if c[0] <= min_l00:
                continue
        c[-1] = 1.0 - c[:-1].sum()
        states.append(BellDiagonal.from_sequence(c.tolist()))
    return states


@pytest.fixture
def counterexample():
    return BellDiagonal(0.605, 0.385, 0.005, 0.005)
