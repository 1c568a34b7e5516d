"""Fitness-guided denoising: a DDIM reverse step whose clean-sample estimate
is a fitness- and kernel-weighted average of the current population.
"""

from __future__ import annotations

import numpy as np
from scipy.special import logsumexp

from .schedule import NoiseSchedule, coefficients


class NumericalError(ArithmeticError):
    pass


def _check_fitness(f) -> np.ndarray:
    f = np.asarray(f, dtype=float).reshape(-1)
    if f.size == 0:
        raise ValueError("fitness vector is empty")
    bad = np.flatnonzero(~np.isfinite(f))
    if bad.size:
        raise ValueError(f"non-finite fitness at index {bad[0]}: {f[bad[0]]}")
    return f


def normalize_fitness(f) -> np.ndarray:
    """Min-max scale to [0, 1]; all zeros when the fitness is constant."""
    f = _check_fitness(f)
    lo, hi = f.min(), f.max()
    if hi == lo:
        return np.zeros_like(f)
    return (f - lo) / (hi - lo)


def map_fitness(f, beta: float = 10.0) -> np.ndarray:
    """Log-density of each individual under the target distribution.

    ``g(f) = exp(beta * z)`` with ``z`` the min-max normalized fitness, so
    the log is just ``beta * z``.
    """
    if not beta > 0:
        raise ValueError(f"beta must be > 0, got {beta}")
    return beta * normalize_fitness(f)


def estimate_x0(population, log_g, sqrt_abar_t: float, one_minus_abar_t: float) -> np.ndarray:
    """Per-individual posterior mean of the clean sample.

    Row ``j`` of the result is ``sum_i w_ij x_i`` with
    ``log w_ij = log_g[i] - |x_j - sqrt_abar_t x_i|^2 / (2 (1 - abar_t)) + const``,
    normalized over ``i``.
    """
    x = np.asarray(population, dtype=float)
    if x.ndim != 2 or x.shape[0] < 1 or x.shape[1] < 1:
        raise ValueError(f"population must be a non-empty N x D matrix, got shape {x.shape}")
    log_g = np.asarray(log_g, dtype=float).reshape(-1)
    if log_g.size != x.shape[0]:
        raise ValueError(f"{log_g.size} weights for {x.shape[0]} individuals")
    if not one_minus_abar_t > 0:
        raise ValueError(f"1 - abar_t must be > 0, got {one_minus_abar_t}")

    logw = log_weights(x, log_g, sqrt_abar_t, one_minus_abar_t)
    w = np.exp(logw)
    return w @ x


def log_weights(x: np.ndarray, log_g: np.ndarray, sqrt_abar_t: float, one_minus_abar_t: float) -> np.ndarray:
    """Normalized log weights, ``[j, i]`` is the weight of source ``i`` for target ``j``."""
    # direct differences; the |a|^2 + |b|^2 - 2ab expansion cancels badly when 1 - abar_t is tiny
    diff = x[:, None, :] - sqrt_abar_t * x[None, :, :]
    sq = np.einsum("jid,jid->ji", diff, diff)
    logits = log_g[None, :] - sq / (2.0 * one_minus_abar_t)
    norm = logsumexp(logits, axis=1, keepdims=True)
    assert np.all(np.isfinite(norm)), "log-sum-exp normalizer is not finite"
    return logits - norm


def ddim_update(x_t, x0, sqrt_abar_t: float, sqrt_one_minus_abar_t: float,
                sqrt_abar_prev: float, dir_coeff: float, sigma_t: float, noise) -> np.ndarray:
    """Reverse DDIM step given an explicit clean-sample estimate ``x0``."""
    x_t = np.asarray(x_t, dtype=float)
    x0 = np.asarray(x0, dtype=float)
    eps_hat = (x_t - sqrt_abar_t * x0) / sqrt_one_minus_abar_t
    out = sqrt_abar_prev * x0 + dir_coeff * eps_hat
    if sigma_t:
        out = out + sigma_t * np.asarray(noise, dtype=float)
    return out


def denoise_step(population, x0, s: NoiseSchedule, t: int, rng: np.random.Generator) -> np.ndarray:
    """One fitness-guided step from ``x_t`` to ``x_{t-1}``.

    Noise is drawn as a single ``N x D`` standard-normal block (row-major,
    individual-major) so the draw order is fixed regardless of how the
    arithmetic is carried out.
    """
    x = np.asarray(population, dtype=float)
    x0 = np.asarray(x0, dtype=float)
    if x.shape != x0.shape:
        raise ValueError(f"population shape {x.shape} != x0 shape {x0.shape}")
    sa_t, s1ma_t, sa_prev, dir_coeff = coefficients(s, t)
    sigma_t = s.sigma_t(t)
    noise = rng.standard_normal(x.shape)
    out = ddim_update(x, x0, sa_t, s1ma_t, sa_prev, dir_coeff, sigma_t, noise)
    if not np.all(np.isfinite(out)):
        raise NumericalError(f"non-finite values after denoising step t={t}")
    return out
