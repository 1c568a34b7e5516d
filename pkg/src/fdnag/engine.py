"""Generation loop: Gaussian init, then T rounds of
fitness -> guided denoise -> evaluate offspring -> select survivors.
"""

from __future__ import annotations

import json
import logging
import math
import time
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from .codec import Genotype, SearchSpaceShape, decode_batch
from .denoise import NumericalError, estimate_x0, map_fitness, denoise_step
from .oracle import (
    EXHAUSTIVE_CAP,
    FitnessOracle,
    OracleError,
    SyntheticFunction,
    SyntheticOracle,
    TabularBenchmark,
)
from .schedule import NoiseSchedule, linear_schedule
from .selection import CandidatePool, SelectionConfig, select

log = logging.getLogger(__name__)


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class GenerationConfig:
    shape: SearchSpaceShape = SearchSpaceShape(6, 5)
    n: int = 30
    steps: int = 100
    abar_start: float = 1 - 1e-4
    abar_end: float = 1e-4
    sigma: float = 0.8
    sigma_mode: str = "scaled"
    beta: float = 10.0
    selection: SelectionConfig = SelectionConfig()
    seed: int = 0
    topk: int = 5
    # ablation switches: uniform density instead of fitness guidance / offspring replace parents
    guidance: bool = True
    use_selection: bool = True
    record_timing: bool = False

    def __post_init__(self):
        if self.n < 2:
            raise ConfigError(f"population size n must be >= 2, got {self.n}")
        if self.steps < 1:
            raise ConfigError(f"steps must be >= 1, got {self.steps}")
        if not 1 <= self.topk <= self.n:
            raise ConfigError(f"topk must be in [1, n={self.n}], got {self.topk}")
        if not self.beta > 0:
            raise ConfigError(f"beta must be > 0, got {self.beta}")
        if not 0 <= self.seed < 2**64:
            raise ConfigError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.use_selection:
            try:
                self.selection.counts(self.n)
            except ValueError as e:
                raise ConfigError(str(e)) from None

    def schedule(self) -> NoiseSchedule:
        return linear_schedule(self.steps, self.abar_start, self.abar_end, self.sigma, self.sigma_mode)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["shape"] = [self.shape.d1, self.shape.d2]
        return d


@dataclass
class StepRecord:
    t: int
    best: float
    mean: float
    std: float
    evals: int
    ms: float | None
    best_seen: float


@dataclass
class RunTrace:
    records: list[StepRecord] = field(default_factory=list)

    def append(self, rec: StepRecord) -> None:
        self.records.append(rec)

    @property
    def best(self) -> np.ndarray:
        return np.array([r.best for r in self.records])

    def to_csv(self) -> str:
        lines = ["t,best,mean,std,evals,ms"]
        for r in self.records:
            ms = "" if r.ms is None else f"{r.ms:.3f}"
            lines.append(f"{r.t},{r.best!r},{r.mean!r},{r.std!r},{r.evals},{ms}")
        return "\n".join(lines) + "\n"


@dataclass
class RunResult:
    config: GenerationConfig
    population: np.ndarray
    fitness: np.ndarray
    trace: RunTrace
    evaluations: int
    topk: list[tuple[Genotype, float]] = field(default_factory=list)
    best_latent: np.ndarray | None = None
    best_value: float | None = None
    best_seen: float | None = None

    @property
    def top1(self) -> tuple[Genotype, float]:
        return self.topk[0]

    def to_json(self, config_echo: dict | None = None) -> str:
        doc = {
            "config": self.config.to_dict() if config_echo is None else config_echo,
            "topk": [{"genotype": str(g), "fitness": f} for g, f in self.topk],
            "evaluations": self.evaluations,
            "best_seen": self.best_seen,
        }
        if self.best_latent is not None:
            doc["best_latent"] = self.best_latent.tolist()
            doc["best_value"] = self.best_value
        return json.dumps(doc, indent=2) + "\n"


def _evolve(cfg: GenerationConfig, dim: int, evaluate: Callable[[np.ndarray], np.ndarray],
            count: Callable[[], int]):
    sched = cfg.schedule()
    rng = np.random.default_rng(cfg.seed)
    n = cfg.n
    trace = RunTrace()

    def fitness_of(x, t):
        try:
            f = np.asarray(evaluate(x), dtype=float)
        except (OracleError, OSError, KeyError, ValueError) as e:
            raise OracleError(f"oracle failed at step t={t}: {e}") from e
        if f.shape != (x.shape[0],) or not np.all(np.isfinite(f)):
            raise OracleError(f"oracle returned invalid fitness at step t={t}")
        return f

    def record(t, x, f, ms, best_seen):
        trace.append(StepRecord(
            t=t, best=float(f.max()), mean=float(f.mean()),
            std=float(x.std(axis=0).mean()), evals=count(),
            ms=ms if cfg.record_timing else None, best_seen=best_seen,
        ))

    x = rng.standard_normal((n, dim))
    f = fitness_of(x, cfg.steps)
    best_seen = float(f.max())
    record(cfg.steps, x, f, 0.0, best_seen)

    for t in range(cfg.steps, 0, -1):
        t0 = time.perf_counter()
        sa_t = math.sqrt(sched.alpha_bar[t])
        log_g = map_fitness(f, cfg.beta) if cfg.guidance else np.zeros(n)
        x0 = estimate_x0(x, log_g, sa_t, 1.0 - sched.alpha_bar[t])
        child = denoise_step(x, x0, sched, t, rng)
        fc = fitness_of(child, t)
        best_seen = max(best_seen, float(fc.max()))
        if cfg.use_selection:
            pool = CandidatePool.from_generations(x, f, child, fc)
            x, f, _ = select(pool, cfg.selection, n, rng)
        else:
            x, f = child, fc
        if not np.all(np.isfinite(x)):
            raise NumericalError(f"non-finite population after step t={t}")
        record(t - 1, x, f, (time.perf_counter() - t0) * 1e3, best_seen)
        log.debug("t=%d best=%.6g mean=%.6g", t - 1, f.max(), f.mean())

    return x, f, trace, best_seen


def run(config: GenerationConfig, oracle: FitnessOracle) -> RunResult:
    """Generate architectures for a discrete oracle; returns the deduplicated top-k survivors."""
    if oracle.mode != "discrete":
        raise ConfigError("run() needs a discrete oracle; use run_continuous for raw latents")
    if oracle.shape is not None and oracle.shape != config.shape:
        raise ConfigError(f"oracle shape {oracle.shape} does not match config shape {config.shape}")
    x, f, trace, best_seen = _evolve(config, config.shape.dim, oracle.evaluate, lambda: oracle.eval_count)

    best: dict[Genotype, float] = {}
    for g, v in zip(decode_batch(x, config.shape), f.tolist()):
        if g not in best or v > best[g]:
            best[g] = v
    ranked = sorted(best.items(), key=lambda kv: (-kv[1], kv[0].ops))
    return RunResult(
        config=config, population=x, fitness=f, trace=trace,
        evaluations=oracle.eval_count, topk=ranked[: config.topk], best_seen=best_seen,
    )


def run_continuous(config: GenerationConfig, fn: SyntheticFunction,
                   oracle: FitnessOracle | None = None) -> RunResult:
    """Same loop on raw latents of dimension ``fn.dim``; no decoding."""
    oracle = oracle or SyntheticOracle(fn)
    x, f, trace, best_seen = _evolve(config, fn.dim, oracle.evaluate, lambda: oracle.eval_count)
    i = int(np.argmax(f))
    return RunResult(
        config=config, population=x, fitness=f, trace=trace, evaluations=oracle.eval_count,
        best_latent=x[i].copy(), best_value=float(f[i]), best_seen=best_seen,
    )


def brute_force_optimum(b: TabularBenchmark, cap: int = EXHAUSTIVE_CAP) -> tuple[Genotype, float]:
    """Exhaustive argmax over a complete table; ties go to the smallest op tuple."""
    if len(b.table) > cap:
        raise ConfigError(f"table has {len(b.table)} entries, above the exhaustive cap of {cap}")
    if not b.complete:
        raise ConfigError("brute-force optimum needs a complete table")
    best_g, best_f = None, -math.inf
    for key, v in b.table.items():
        g = Genotype.parse(key)
        if v > best_f or (v == best_f and g.ops < best_g.ops):
            best_g, best_f = g, v
    return best_g, best_f
