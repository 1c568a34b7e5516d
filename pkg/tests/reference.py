"""Slow loop-based references used by several test modules."""

import math

import numpy as np


def naive_x0(x, log_g, sqrt_abar, one_minus_abar):
    """Double loop over direct Gaussian densities, no log space."""
    n, d = x.shape
    var = one_minus_abar
    out = np.zeros_like(x)
    for j in range(n):
        num = np.zeros(d)
        den = 0.0
        for i in range(n):
            sq = sum((x[j, k] - sqrt_abar * x[i, k]) ** 2 for k in range(d))
            dens = math.exp(-sq / (2 * var)) / (2 * math.pi * var) ** (d / 2)
            w = math.exp(log_g[i]) * dens
            num += w * x[i]
            den += w
        out[j] = num / den
    return out
