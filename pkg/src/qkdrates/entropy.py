"""Base-2 entropies with the 0*log(0) = 0 convention."""

from __future__ import annotations

import math

import numpy as np

_SLACK = 1e-12


def neg_xlog2x(x):
    """``-x*log2(x)`` elementwise, 0 for x <= 0; floats stay floats, arrays stay arrays."""
    if isinstance(x, np.ndarray):
        safe = np.where(x > 0, x, 1.0)
        return np.where(x > 0, -x * np.log2(safe), 0.0)
    return -x * math.log2(x) if x > 0 else 0.0


def binary_entropy(p: float) -> float:
    p = float(p)
    if not (-_SLACK <= p <= 1 + _SLACK):
        raise ValueError(f"binary entropy undefined for p={p!r}")
    p = min(max(p, 0.0), 1.0)
    return neg_xlog2x(p) + neg_xlog2x(1.0 - p)


def entropy4(s) -> float:
    """Shannon entropy of the four Bell coefficients of ``s``."""
    return sum(neg_xlog2x(c) for c in s.as_tuple())
