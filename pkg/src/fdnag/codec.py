"""Conversion between continuous latent matrices and discrete genotypes.

A search space is described by ``d1`` decision slots (cell edges), each taking
one of ``d2`` operations. A latent is a ``d1 x d2`` real matrix stored
row-major as a flat vector; decoding takes the per-row argmax.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np


class CodecError(ValueError):
    pass


@dataclass(frozen=True)
class SearchSpaceShape:
    d1: int
    d2: int

    def __post_init__(self):
        if int(self.d1) != self.d1 or int(self.d2) != self.d2:
            raise CodecError(f"shape dims must be integers, got ({self.d1}, {self.d2})")
        if self.d1 < 1:
            raise CodecError(f"d1 must be >= 1, got {self.d1}")
        if self.d2 < 2:
            raise CodecError(f"d2 must be >= 2, got {self.d2}")

    @property
    def dim(self) -> int:
        """Length of the flattened latent vector."""
        return self.d1 * self.d2


@dataclass(frozen=True, order=True)
class Genotype:
    ops: tuple[int, ...]

    def __str__(self) -> str:
        return "-".join(str(o) for o in self.ops)

    @classmethod
    def parse(cls, text: str, shape: SearchSpaceShape | None = None) -> "Genotype":
        text = text.strip()
        parts = text.split("-") if text else []
        if not parts or any(not (p.isascii() and p.isdigit()) for p in parts):
            raise CodecError(f"malformed genotype {text!r}")
        g = cls(tuple(int(p) for p in parts))
        if shape is not None:
            g.validate(shape)
        return g

    def validate(self, shape: SearchSpaceShape) -> None:
        if len(self.ops) != shape.d1:
            raise CodecError(
                f"genotype {self} has {len(self.ops)} slots, shape expects {shape.d1}"
            )
        for k, o in enumerate(self.ops):
            if not 0 <= o < shape.d2:
                raise CodecError(f"genotype {self}: op {o} at slot {k} not in [0, {shape.d2})")


def _as_matrix(latent, shape: SearchSpaceShape) -> np.ndarray:
    arr = np.asarray(latent, dtype=float)
    if arr.size != shape.dim:
        raise CodecError(f"latent has {arr.size} entries, shape {shape.d1}x{shape.d2} needs {shape.dim}")
    return arr.reshape(shape.d1, shape.d2)


def decode(latent, shape: SearchSpaceShape) -> Genotype:
    """Per-row argmax of a latent; ties go to the lowest index."""
    m = _as_matrix(latent, shape)
    bad = np.argwhere(~np.isfinite(m))
    if len(bad):
        r, c = bad[0]
        raise CodecError(f"non-finite latent entry at row {r}, column {c}")
    # np.argmax returns the first maximal index
    return Genotype(tuple(int(i) for i in np.argmax(m, axis=1)))


def decode_batch(batch, shape: SearchSpaceShape) -> list[Genotype]:
    arr = np.asarray(batch, dtype=float).reshape(-1, shape.dim)
    return [decode(row, shape) for row in arr]


def encode(genotype: Genotype, shape: SearchSpaceShape, hot: float = 1.0, cold: float = 0.0) -> np.ndarray:
    """One-hot style latent (flattened) with ``hot`` at the chosen op of each row."""
    if not hot > cold:
        raise CodecError(f"hot ({hot}) must exceed cold ({cold})")
    genotype.validate(shape)
    m = np.full((shape.d1, shape.d2), float(cold))
    m[np.arange(shape.d1), list(genotype.ops)] = float(hot)
    return m.reshape(-1)


def genotype_count(shape: SearchSpaceShape, limit: int = 2**63 - 1) -> int:
    """Number of genotypes, ``d2 ** d1``.

    Python ints do not wrap, but callers that hand the count to fixed-width
    code need a bound; counts above ``limit`` raise instead.
    """
    count = shape.d2 ** shape.d1
    if count > limit:
        raise OverflowError(f"genotype count {shape.d2}^{shape.d1} exceeds {limit}")
    return count


def all_genotypes(shape: SearchSpaceShape) -> Iterator[Genotype]:
    """Enumerate the space in lexicographic order of op tuples."""
    for ops in itertools.product(range(shape.d2), repeat=shape.d1):
        yield Genotype(ops)


def genotype_matrix(shape: SearchSpaceShape) -> np.ndarray:
    """All genotypes as an integer array, rows in the same order as ``all_genotypes``."""
    grids = np.indices((shape.d2,) * shape.d1).reshape(shape.d1, -1)
    return grids.T


def hamming(a: Sequence[int], b: Sequence[int]) -> int:
    return sum(x != y for x, y in zip(a, b))
