"""Fractional ranking with average-rank tie handling."""

import numpy as np


def fractional_ranks(values: np.ndarray) -> np.ndarray:
    """Rank a 1-D array from 1 to n, assigning tied values their average rank.

    Example: [10, 20, 20, 30] -> [1.0, 2.5, 2.5, 4.0].
    """
    x = np.asarray(values)
    n = x.shape[0]
    order = np.argsort(x, kind="stable")
    ranks = np.empty(n, dtype=np.float64)
    i = 0
    while i < n:
        j = i
        while j + 1 < n and x[order[j + 1]] == x[order[i]]:
            j += 1
        # positions i..j (0-based) share the average of ranks i+1..j+1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks
