"""Survivor selection over the parent + offspring pool.

Slots are filled in order: elitism, then greedy farthest-point diversity,
then fitness-proportional roulette without replacement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

ROULETTE_EPS = 1e-6


class SelectionError(ValueError):
    pass


@dataclass(frozen=True)
class SelectionConfig:
    frac_elite: float = 0.10
    frac_diverse: float = 0.20
    frac_roulette: float = 0.70

    def __post_init__(self):
        fr = (self.frac_elite, self.frac_diverse, self.frac_roulette)
        if any(not math.isfinite(x) or x < 0 for x in fr):
            raise SelectionError(f"selection fractions must be non-negative, got {fr}")
        if abs(sum(fr) - 1.0) > 1e-9:
            raise SelectionError(f"selection fractions must sum to 1, got {sum(fr)!r}")

    def counts(self, n: int) -> tuple[int, int, int]:
        """Slot counts ``(elite, diverse, roulette)`` for a population of ``n``."""
        n_e = _round_half_up(self.frac_elite * n)
        n_d = _round_half_up(self.frac_diverse * n)
        if n_e + n_d > n:
            raise SelectionError(f"elite ({n_e}) + diverse ({n_d}) slots exceed population {n}")
        return n_e, n_d, n - n_e - n_d


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


@dataclass
class CandidatePool:
    rows: np.ndarray
    fitness: np.ndarray
    is_offspring: np.ndarray

    @classmethod
    def from_generations(cls, parents, parent_fitness, offspring, offspring_fitness) -> "CandidatePool":
        parents = np.asarray(parents, dtype=float)
        offspring = np.asarray(offspring, dtype=float)
        if parents.shape != offspring.shape:
            raise SelectionError(f"parent shape {parents.shape} != offspring shape {offspring.shape}")
        return cls(
            rows=np.vstack([parents, offspring]),
            fitness=np.concatenate([np.asarray(parent_fitness, float), np.asarray(offspring_fitness, float)]),
            is_offspring=np.repeat([False, True], parents.shape[0]),
        )


@dataclass
class SelectionReport:
    elite: list[int] = field(default_factory=list)
    diverse: list[int] = field(default_factory=list)
    roulette: list[int] = field(default_factory=list)

    @property
    def indices(self) -> list[int]:
        return self.elite + self.diverse + self.roulette


def select(pool: CandidatePool, cfg: SelectionConfig, n: int, rng: np.random.Generator):
    """Pick ``n`` distinct rows from a ``2n``-row pool.

    Returns the selected rows, their (copied) fitness and a ``SelectionReport``
    of pool indices per rule.
    """
    rows = np.asarray(pool.rows, dtype=float)
    fit = np.asarray(pool.fitness, dtype=float)
    if rows.shape[0] == 0:
        raise ValueError("empty candidate pool")
    if rows.shape[0] != 2 * n or fit.shape != (2 * n,):
        raise ValueError(f"pool must hold {2 * n} rows with fitness, got {rows.shape[0]} / {fit.shape}")
    bad = np.flatnonzero(~np.isfinite(fit))
    if bad.size:
        raise ValueError(f"non-finite pool fitness at row {bad[0]}")
    n_e, n_d, n_r = cfg.counts(n)

    report = SelectionReport()
    taken = np.zeros(len(fit), dtype=bool)

    # stable sort on -fitness keeps lower row index first among ties
    order = np.argsort(-fit, kind="stable")
    report.elite = [int(i) for i in order[:n_e]]
    taken[report.elite] = True

    report.diverse = farthest_point(rows, taken, n_d)
    taken[report.diverse] = True

    report.roulette = roulette(fit, taken, n_r, rng)

    idx = report.indices
    return rows[idx].copy(), fit[idx].copy(), report


def farthest_point(rows: np.ndarray, taken: np.ndarray, k: int) -> list[int]:
    """Greedy max-min Euclidean picks among rows not yet ``taken``.

    Distances are measured to everything already taken. With nothing taken
    yet, the first pick is the row farthest from the pool centroid.
    """
    taken = taken.copy()
    picks: list[int] = []
    if k == 0:
        return picks
    if taken.any():
        d = np.min(_dist(rows, rows[taken]), axis=1)
    else:
        d = _dist(rows, rows.mean(axis=0, keepdims=True))[:, 0]
    for _ in range(k):
        cand = np.where(taken, -np.inf, d)
        i = int(np.argmax(cand))
        picks.append(i)
        taken[i] = True
        d = np.minimum(d, _dist(rows, rows[i : i + 1])[:, 0])
    return picks


def _dist(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    diff = a[:, None, :] - b[None, :, :]
    return np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))


def roulette(fit: np.ndarray, taken: np.ndarray, k: int, rng: np.random.Generator) -> list[int]:
    """``k`` draws without replacement, probability proportional to shifted min-max fitness.

    Weights are fixed over the rows still available before the first draw;
    each draw consumes one ``rng.random()``.
    """
    avail = np.flatnonzero(~taken)
    if k > avail.size:
        raise SelectionError(f"cannot draw {k} rows from {avail.size} remaining")
    f = fit[avail]
    lo, hi = f.min() if f.size else 0.0, f.max() if f.size else 0.0
    if hi > lo:
        w = (f - lo) / (hi - lo) + ROULETTE_EPS
    else:
        w = np.ones_like(f)
    picks = []
    for _ in range(k):
        c = np.cumsum(w)
        u = rng.random() * c[-1]
        j = int(np.searchsorted(c, u, side="right"))
        # guard against u landing on the float end of the cumsum or a zeroed slot
        j = min(j, w.size - 1)
        while w[j] == 0:
            j -= 1
        picks.append(int(avail[j]))
        w[j] = 0.0
    return picks
