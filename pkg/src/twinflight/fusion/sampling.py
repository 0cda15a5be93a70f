"""Latin hypercube sampling for surrogate training designs."""

from __future__ import annotations

import numpy as np


def lhs_sample(bounds: list[tuple[float, float]], n: int, seed: int) -> np.ndarray:
    """n x m Latin hypercube design over the given per-dimension bounds.

    Each dimension is split into n equal-width strata and receives exactly
    one uniformly placed sample per stratum; strata are paired across
    dimensions by independent seeded permutations, so a fixed seed gives a
    fixed design.
    """
    if n < 1:
        raise ValueError(f"sample count must be >= 1, got {n}")
    for lo, hi in bounds:
        if not hi > lo:
            raise ValueError(f"degenerate bounds [{lo}, {hi}]")
    rng = np.random.default_rng(seed)
    m = len(bounds)
    unit = np.empty((n, m))
    for k in range(m):
        strata = (rng.permutation(n) + rng.uniform(size=n)) / n
        unit[:, k] = strata
    lows = np.array([b[0] for b in bounds])
    highs = np.array([b[1] for b in bounds])
    return lows + unit * (highs - lows)
