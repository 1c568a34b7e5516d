"""Uniform random search, used as the equal-budget reference."""

from __future__ import annotations

import numpy as np

from .codec import SearchSpaceShape
from .oracle import FitnessOracle


def random_search_discrete(oracle: FitnessOracle, shape: SearchSpaceShape, budget: int, seed: int,
                           batch: int = 64, max_draws: int | None = None) -> float:
    """Best fitness from uniform genotypes until ``oracle.eval_count`` grows by ``budget``.

    With a cached oracle the budget counts distinct genotypes, the same unit
    the generator is charged in.
    """
    rng = np.random.default_rng(seed)
    start = oracle.eval_count
    max_draws = max_draws or 100 * budget + 1000
    best = -np.inf
    draws = 0
    while oracle.eval_count - start < budget and draws < max_draws:
        k = min(batch, budget - (oracle.eval_count - start))
        ops = rng.integers(0, shape.d2, size=(k, shape.d1))
        lat = np.zeros((k, shape.d1, shape.d2))
        np.put_along_axis(lat, ops[:, :, None], 1.0, axis=2)
        best = max(best, float(oracle.evaluate(lat.reshape(k, -1)).max()))
        draws += k
    return best


def random_search_continuous(oracle: FitnessOracle, dim: int, budget: int, seed: int,
                             bound: float = 3.0) -> float:
    """Best fitness of ``budget`` uniform points in ``[-bound, bound]^dim``."""
    rng = np.random.default_rng(seed)
    x = rng.uniform(-bound, bound, size=(budget, dim))
    return float(oracle.evaluate(x).max())
