"""Fitness oracles: tabular benchmark lookup, planted synthetic tables,
continuous test functions and a genotype-keyed cache.

Fitness is always maximized; oracles for loss-like metrics must negate.
"""

from __future__ import annotations

import math
import os
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np

from .codec import (
    CodecError,
    Genotype,
    SearchSpaceShape,
    decode_batch,
    genotype_count,
    genotype_matrix,
)

HEADER = "genotype,fitness"
PLANTED_MARGIN = 1e-3
EXHAUSTIVE_CAP = 10**6


class OracleError(RuntimeError):
    pass


class TableFormatError(OracleError):
    pass


@dataclass
class TabularBenchmark:
    shape: SearchSpaceShape
    table: dict[str, float]
    allow_partial: bool = False
    floor: float = 0.0

    def __post_init__(self):
        for key, value in self.table.items():
            Genotype.parse(key, self.shape)
            if not math.isfinite(value):
                raise TableFormatError(f"non-finite fitness for {key}")
        expected = genotype_count(self.shape)
        if not self.allow_partial and len(self.table) != expected:
            raise TableFormatError(
                f"table has {len(self.table)} of {expected} genotypes (set allow_partial to accept)"
            )

    @property
    def complete(self) -> bool:
        return len(self.table) == genotype_count(self.shape)

    def lookup(self, g: Genotype | str) -> float:
        key = str(g)
        if key in self.table:
            return self.table[key]
        if self.allow_partial:
            return self.floor
        raise OracleError(f"genotype {key} missing from table")


def format_fitness(value: float) -> str:
    """Shortest round-tripping positional decimal (no exponent)."""
    return np.format_float_positional(float(value), unique=True, trim="0")


def write_tabular(bench: TabularBenchmark, path) -> None:
    """Write the table atomically: temp file in the target directory, then rename."""
    path = Path(path)
    lines = [HEADER] + [f"{k},{format_fitness(v)}" for k, v in bench.table.items()]
    atomic_write_text(path, "\n".join(lines) + "\n")


def atomic_write_text(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(f".{path.name}.{os.getpid()}.tmp")
    try:
        with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    finally:
        if tmp.exists():
            tmp.unlink()


def read_table(path) -> dict[str, float]:
    """Parse a ``genotype,fitness`` file into an ordered dict without shape checks."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise OracleError(f"cannot read table {path}: {e.strerror or e}") from e
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or lines[0] != HEADER:
        raise TableFormatError(f"{path}:1: expected header {HEADER!r}")
    table: dict[str, float] = {}
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != 2:
            raise TableFormatError(f"{path}:{lineno}: expected '<genotype>,<fitness>', got {line!r}")
        key, raw = parts
        try:
            g = Genotype.parse(key)
            value = float(raw)
        except (CodecError, ValueError):
            raise TableFormatError(f"{path}:{lineno}: malformed line {line!r}") from None
        if str(g) != key:
            raise TableFormatError(f"{path}:{lineno}: non-canonical genotype {key!r}")
        if not math.isfinite(value):
            raise TableFormatError(f"{path}:{lineno}: non-finite fitness {raw!r}")
        if key in table:
            raise TableFormatError(f"{path}:{lineno}: duplicate genotype {key}")
        table[key] = value
    return table


def infer_shape(table: dict[str, float]) -> SearchSpaceShape:
    if not table:
        raise TableFormatError("empty table, cannot infer shape")
    ops = [Genotype.parse(k).ops for k in table]
    lengths = {len(o) for o in ops}
    if len(lengths) != 1:
        raise TableFormatError(f"genotypes have mixed lengths {sorted(lengths)}")
    d2 = max(max(o) for o in ops) + 1
    return SearchSpaceShape(lengths.pop(), max(d2, 2))


def load_tabular(path, shape: SearchSpaceShape | None = None, allow_partial: bool = False,
                 floor: float = 0.0) -> TabularBenchmark:
    """Load and validate a table file; the shape is inferred when not given."""
    table = read_table(path)
    if shape is None:
        shape = infer_shape(table)
    try:
        return TabularBenchmark(shape, table, allow_partial=allow_partial, floor=floor)
    except CodecError as e:
        raise TableFormatError(f"{path}: {e}") from None
    except TableFormatError as e:
        raise TableFormatError(f"{path}: {e}") from None


def build_planted_tabular(shape: SearchSpaceShape, optimum: Genotype, smoothness: float = 0.05,
                          seed: int = 0) -> TabularBenchmark:
    """Complete table with a known unique optimum.

    ``fitness(g) = 1 - hamming(g, optimum) / d1 + smoothness * u(g)`` with
    ``u`` uniform in [-1, 1], drawn in enumeration order from ``seed``.
    Non-optimal entries are clamped to at most ``1 - 1e-3``.
    """
    optimum.validate(shape)
    n = genotype_count(shape)
    if n > EXHAUSTIVE_CAP:
        raise OracleError(f"planted table of {n} entries exceeds cap {EXHAUSTIVE_CAP}")
    G = genotype_matrix(shape)
    dist = np.sum(G != np.asarray(optimum.ops), axis=1)
    u = np.random.default_rng(seed).uniform(-1.0, 1.0, size=n)
    fit = 1.0 - dist / shape.d1 + smoothness * u
    fit = np.minimum(fit, 1.0 - PLANTED_MARGIN)
    best = dist == 0
    fit[best] = 1.0
    assert best.sum() == 1 and np.argmax(fit) == np.flatnonzero(best)[0]
    keys = ["-".join(map(str, row)) for row in G.tolist()]
    return TabularBenchmark(shape, dict(zip(keys, fit.tolist())))


def evaluate_tabular(b: TabularBenchmark, batch) -> np.ndarray:
    return np.array([b.lookup(g) for g in decode_batch(batch, b.shape)], dtype=float)


@dataclass(frozen=True)
class SyntheticFunction:
    kind: str
    dim: int

    def __post_init__(self):
        if self.kind not in ("sphere", "rastrigin"):
            raise ValueError(f"unknown synthetic function {self.kind!r}")
        if self.dim < 1:
            raise ValueError(f"dimension must be >= 1, got {self.dim}")


def evaluate_synthetic(fn: SyntheticFunction, batch) -> np.ndarray:
    x = np.asarray(batch, dtype=float)
    x = x.reshape(-1, x.shape[-1]) if x.ndim else x.reshape(1, 1)
    if x.shape[1] != fn.dim:
        raise ValueError(f"{fn.kind} expects dimension {fn.dim}, got {x.shape[1]}")
    if fn.kind == "sphere":
        return -np.sum(x * x, axis=1)
    return -(10.0 * fn.dim + np.sum(x * x - 10.0 * np.cos(2 * np.pi * x), axis=1))


class FitnessOracle:
    """Base oracle: maps a batch of latents (rows) to fitness values.

    ``mode`` is ``"discrete"`` when rows are decoded to genotypes first and
    ``"continuous"`` when raw latents are scored.
    """

    mode = "discrete"
    shape: SearchSpaceShape | None = None

    def __init__(self):
        self._count = 0
        self._lock = threading.Lock()

    @property
    def eval_count(self) -> int:
        return self._count

    def _bump(self, k: int) -> None:
        with self._lock:
            self._count += k

    def evaluate(self, batch) -> np.ndarray:
        raise NotImplementedError


class GenotypeOracle(FitnessOracle):
    """Discrete oracle; subclasses implement ``score`` on genotypes."""

    def __init__(self, shape: SearchSpaceShape):
        super().__init__()
        self.shape = shape

    def score(self, genotypes: list[Genotype]) -> np.ndarray:
        raise NotImplementedError

    def evaluate(self, batch) -> np.ndarray:
        gs = decode_batch(batch, self.shape)
        out = self.score(gs)
        self._bump(len(gs))
        return np.asarray(out, dtype=float)


class TabularOracle(GenotypeOracle):
    def __init__(self, bench: TabularBenchmark):
        super().__init__(bench.shape)
        self.bench = bench

    def score(self, genotypes):
        return np.array([self.bench.lookup(g) for g in genotypes], dtype=float)


class SyntheticOracle(FitnessOracle):
    mode = "continuous"

    def __init__(self, fn: SyntheticFunction):
        super().__init__()
        self.fn = fn

    def evaluate(self, batch) -> np.ndarray:
        out = evaluate_synthetic(self.fn, batch)
        self._bump(out.size)
        return out


class ConstantOracle(GenotypeOracle):
    """Every genotype scores ``value``; exercises the degenerate-fitness paths."""

    def __init__(self, shape: SearchSpaceShape, value: float = 0.0):
        super().__init__(shape)
        self.value = float(value)

    def score(self, genotypes):
        return np.full(len(genotypes), self.value)


class CachedOracle(FitnessOracle):
    """Memoizes a discrete oracle by canonical genotype string.

    Repeats within one batch are scored once. ``eval_count`` reports the
    wrapped oracle's count, so it only grows on cache misses.
    """

    def __init__(self, inner: GenotypeOracle):
        if inner.mode != "discrete":
            raise ValueError("only discrete oracles can be cached by genotype")
        super().__init__()
        self.inner = inner
        self.shape = inner.shape
        self.cache: dict[str, float] = {}

    @property
    def eval_count(self) -> int:
        return self.inner.eval_count

    def evaluate(self, batch) -> np.ndarray:
        gs = decode_batch(batch, self.shape)
        keys = [str(g) for g in gs]
        with self._lock:
            missing: dict[str, Genotype] = {}
            for k, g in zip(keys, gs):
                if k not in self.cache and k not in missing:
                    missing[k] = g
            if missing:
                scores = self.inner.score(list(missing.values()))
                self.inner._bump(len(missing))
                for k, v in zip(missing, np.asarray(scores, dtype=float).tolist()):
                    self.cache.setdefault(k, v)
            return np.array([self.cache[k] for k in keys], dtype=float)


def tabular_oracle(bench: TabularBenchmark, cache: bool = True) -> FitnessOracle:
    o = TabularOracle(bench)
    return CachedOracle(o) if cache else o


def table_items(b: TabularBenchmark) -> Iterable[tuple[Genotype, float]]:
    for k, v in b.table.items():
        yield Genotype.parse(k), v
