"""Cumulative noise schedule and DDIM step coefficients."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

SIGMA_MODES = ("scaled", "ddim", "constant")


class ScheduleError(ValueError):
    pass


@dataclass(frozen=True)
class NoiseSchedule:
    """``alpha_bar[t]`` for ``t = 0..T`` plus the denoising noise scale.

    How ``sigma`` becomes the per-step noise ``sigma_t`` depends on
    ``sigma_mode``:

    * ``"scaled"``: ``sigma_t = sigma * sqrt(1 - a_prev)``, a fixed fraction
      of the largest noise a DDIM step admits. Valid for ``sigma <= 1``.
    * ``"ddim"``: the DDIM ``eta`` form,
      ``sigma * sqrt((1 - a_prev) / (1 - a_t)) * sqrt(1 - a_t / a_prev)``.
    * ``"constant"``: ``sigma_t = sigma`` at every step, valid only while
      ``1 - a_prev - sigma**2 >= 0`` for all t.
    """

    alpha_bar: np.ndarray
    sigma: float
    sigma_mode: str = "scaled"

    def __post_init__(self):
        a = np.asarray(self.alpha_bar, dtype=float)
        a.setflags(write=False)
        object.__setattr__(self, "alpha_bar", a)
        if self.sigma_mode not in SIGMA_MODES:
            raise ScheduleError(f"sigma_mode must be one of {SIGMA_MODES}, got {self.sigma_mode!r}")
        if a.ndim != 1 or a.size < 2:
            raise ScheduleError("alpha_bar needs at least two entries (T >= 1)")
        if not (np.all(np.isfinite(a)) and np.all(a > 0) and np.all(a < 1)):
            raise ScheduleError("alpha_bar entries must lie strictly inside (0, 1)")
        if np.any(np.diff(a) >= 0):
            raise ScheduleError("alpha_bar must be strictly decreasing in t")
        if not (math.isfinite(self.sigma) and self.sigma >= 0):
            raise ScheduleError(f"sigma must be finite and >= 0, got {self.sigma}")
        for t in range(1, self.T + 1):
            r = self.radicand(t)
            if r < 0:
                raise ScheduleError(
                    f"negative radicand 1 - alpha_bar[t-1] - sigma_t^2 = {r:.6g} at t={t}"
                )

    @property
    def T(self) -> int:
        return self.alpha_bar.size - 1

    def sigma_t(self, t: int) -> float:
        self._check_t(t)
        if self.sigma_mode == "constant":
            return float(self.sigma)
        if self.sigma_mode == "scaled":
            return float(self.sigma * math.sqrt(1 - self.alpha_bar[t - 1]))
        a_t, a_prev = self.alpha_bar[t], self.alpha_bar[t - 1]
        return float(self.sigma * math.sqrt((1 - a_prev) / (1 - a_t) * (1 - a_t / a_prev)))

    def radicand(self, t: int) -> float:
        return float(1 - self.alpha_bar[t - 1] - self.sigma_t(t) ** 2)

    def _check_t(self, t: int) -> None:
        if not 1 <= t <= self.T:
            raise ScheduleError(f"t must be in [1, {self.T}], got {t}")


def linear_schedule(T: int = 100, abar_start: float = 1 - 1e-4, abar_end: float = 1e-4,
                    sigma: float = 0.8, sigma_mode: str = "scaled") -> NoiseSchedule:
    """Linear interpolation of ``alpha_bar`` from ``abar_start`` (t=0) to ``abar_end`` (t=T)."""
    if int(T) != T or T < 1:
        raise ScheduleError(f"T must be an integer >= 1, got {T}")
    if not 0 < abar_end < abar_start < 1:
        raise ScheduleError(
            f"need 0 < abar_end < abar_start < 1, got abar_start={abar_start}, abar_end={abar_end}"
        )
    t = np.arange(T + 1, dtype=float)
    a = abar_start + (abar_end - abar_start) * t / T
    # pin the endpoints against rounding in the interpolation
    a[0], a[-1] = abar_start, abar_end
    return NoiseSchedule(a, float(sigma), sigma_mode)


def coefficients(s: NoiseSchedule, t: int) -> tuple[float, float, float, float]:
    """``(sqrt(a_t), sqrt(1 - a_t), sqrt(a_prev), sqrt(1 - a_prev - sigma_t^2))``."""
    s._check_t(t)
    a_t, a_prev = float(s.alpha_bar[t]), float(s.alpha_bar[t - 1])
    r = s.radicand(t)
    if r < 0:
        raise ScheduleError(f"negative radicand at t={t}")
    return math.sqrt(a_t), math.sqrt(1 - a_t), math.sqrt(a_prev), math.sqrt(r)
