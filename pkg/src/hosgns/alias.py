"""Walker alias method for O(1) draws from a fixed discrete distribution."""

from __future__ import annotations

import numpy as np


class AliasTable:
    """Preprocessed categorical distribution supporting vectorized draws."""

    def __init__(self, weights: np.ndarray):
        weights = np.asarray(weights, dtype=np.float64)
        if weights.ndim != 1 or len(weights) == 0:
            raise ValueError("weights must be a non-empty 1-D array")
        if np.any(weights < 0) or weights.sum() <= 0:
            raise ValueError("weights must be non-negative with positive sum")

        n = len(weights)
        scaled = weights * (n / weights.sum())
        self.prob = np.ones(n)
        self.alias = np.arange(n)

        small = [i for i in range(n) if scaled[i] < 1.0]
        large = [i for i in range(n) if scaled[i] >= 1.0]
        while small and large:
            s = small.pop()
            l = large.pop()
            self.prob[s] = scaled[s]
            self.alias[s] = l
            scaled[l] -= 1.0 - scaled[s]
            (small if scaled[l] < 1.0 else large).append(l)
        # leftovers are 1.0 up to float error
        for i in small + large:
            self.prob[i] = 1.0

    def draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Sample ``size`` indices according to the stored distribution."""
        cols = rng.integers(0, len(self.prob), size=size)
        accept = rng.random(size) < self.prob[cols]
        return np.where(accept, cols, self.alias[cols])
