"""Seeded lattice generators for tests, CLI runs and benchmarks."""

import logging
import random
from dataclasses import dataclass
from typing import Optional, Tuple

from errors import ParameterDomainError, RankDeficientError
from lattice import Basis

logger = logging.getLogger(__name__)

FAMILIES = ('identity', 'uniform', 'knapsack', 'scrambled-diagonal')
MAX_REROLLS = 1000


@dataclass(frozen=True)
class GenSpec:
    family: str
    n: int
    m: Optional[int] = None
    bound: int = 10
    seed: int = 0
    diagonal: Optional[Tuple[int, ...]] = None

    @property
    def dim(self) -> int:
        return self.m if self.m is not None else self.n

    def validate(self) -> None:
        if self.family not in FAMILIES:
            raise ParameterDomainError(f"Unknown family '{self.family}', expected one of {', '.join(FAMILIES)}")
        if self.n < 1 or self.dim < self.n:
            raise ParameterDomainError(f"Need 1 <= n <= m, got n={self.n}, m={self.dim}")
        if self.bound < 1:
            raise ParameterDomainError(f"Entry bound must be >= 1, got {self.bound}")
        if self.family == 'knapsack' and self.dim != self.n:
            raise ParameterDomainError("Knapsack lattices are square (m = n)")
        if self.diagonal is not None:
            if len(self.diagonal) != self.n or any(d < 1 for d in self.diagonal):
                raise ParameterDomainError(f"Diagonal must have {self.n} positive entries")


def _identity(spec: GenSpec, rng: random.Random) -> Basis:
    return Basis(tuple(tuple(int(i == j) for i in range(spec.dim)) for j in range(spec.n)))


def _uniform(spec: GenSpec, rng: random.Random) -> Basis:
    return Basis(tuple(tuple(rng.randint(-spec.bound, spec.bound) for _ in range(spec.dim))
                       for _ in range(spec.n)))


def _knapsack(spec: GenSpec, rng: random.Random) -> Basis:
    """Columns (e_j, a_j) for j < n and (0, ..., 0, bound)"""
    n = spec.n
    cols = []
    for j in range(n - 1):
        col = [int(i == j) for i in range(n)]
        col[-1] = rng.randint(0, spec.bound)
        cols.append(tuple(col))
    cols.append(tuple([0] * (n - 1) + [spec.bound]))
    return Basis(tuple(cols))


def _scrambled_diagonal(spec: GenSpec, rng: random.Random) -> Basis:
    n = spec.n
    diag = spec.diagonal or tuple(rng.randint(1, spec.bound) for _ in range(n))
    cols = [[diag[j] if i == j else 0 for i in range(spec.dim)] for j in range(n)]
    if n > 1:
        for _ in range(n * n):
            i, j = rng.sample(range(n), 2)
            c = rng.choice((-2, -1, 1, 2))
            cols[i] = [a + c * b for a, b in zip(cols[i], cols[j])]
    return Basis(tuple(tuple(col) for col in cols))


_BUILDERS = {
    'identity': _identity,
    'uniform': _uniform,
    'knapsack': _knapsack,
    'scrambled-diagonal': _scrambled_diagonal,
}


def generate(spec: GenSpec) -> Basis:
    """Deterministic full-rank basis; rank-deficient draws are re-rolled with
    an attempt counter appended to the seed"""
    spec.validate()
    build = _BUILDERS[spec.family]
    for attempt in range(MAX_REROLLS):
        rng = random.Random(f"{spec.seed}:{attempt}")
        B = build(spec, rng)
        try:
            return B.validate()
        except RankDeficientError:
            logger.debug("Seed %d attempt %d gave a dependent %s basis, re-rolling", spec.seed, attempt, spec.family)
    raise RankDeficientError(f"No full-rank {spec.family} basis after {MAX_REROLLS} draws")
