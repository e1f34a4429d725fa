from __future__ import annotations

import numpy as np
from numpy.typing import ArrayLike


def compensated_cumsum(values: ArrayLike) -> np.ndarray:
    """Running sums with the rounding error of every step carried along.

    ``np.cumsum`` adds left to right, so TwoSum on consecutive prefixes recovers
    each step's exact error; the errors are accumulated separately and added back.
    """
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        return values.copy()
    total = np.cumsum(values)
    before = np.concatenate(([0.0], total[:-1]))
    b_virtual = total - before
    a_virtual = total - b_virtual
    error = (before - a_virtual) + (values - b_virtual)
    return total + np.cumsum(error)


def reverse_cumsum(values: ArrayLike) -> np.ndarray:
    """out[i] = Σ_{j ≥ i} values[j], accumulated from the right end."""
    values = np.asarray(values, dtype=float)
    return compensated_cumsum(values[::-1])[::-1]
