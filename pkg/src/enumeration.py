"""Exact SVP oracle (Schnorr-Euchner enumeration), LLL, and the block-level
SVP/DSVP reduction steps used by DBKZ and slide reduction.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, List, Optional, Sequence, Tuple, Union

from sympy import Matrix, eye

from errors import OracleBudgetExceeded, ParameterDomainError
from lattice import (Basis, BlockRange, Scalar, Vector, combine, dot, gso_compute,
                     projected_block, rational_reversed_dual, size_reduce)

logger = logging.getLogger(__name__)

DEFAULT_MAX_RANK = 16
BLOCK_LLL_EPS = Fraction(1, 3)
# Stronger LLL before enumerating so the initial radius is small.
PREPROCESS_EPS = Fraction(1, 99)


@dataclass
class OracleBudget:
    """Rank cap for enumeration plus a tally of oracle calls"""

    max_rank: int = DEFAULT_MAX_RANK
    call_counter: int = 0

    def charge(self, rank: int) -> None:
        if rank > self.max_rank:
            raise OracleBudgetExceeded(rank, self.max_rank)
        self.call_counter += 1


@dataclass(frozen=True)
class ShortestVectorResult:
    """coeffs are relative to the basis the oracle was called on"""

    coeffs: Tuple[int, ...]
    norm_sq: Fraction
    vector: Vector


def _check_delta(delta: Scalar) -> None:
    if delta < 1:
        raise ParameterDomainError(f"delta must be >= 1, got {delta}")


# ---------------------------------------------------------------------------
# LLL
# ---------------------------------------------------------------------------

def _lll_vectors(vectors: Sequence[Sequence[Scalar]], eps: Fraction) -> Tuple[List[List[Scalar]], List[List[int]]]:
    """eps-LLL on explicit vectors.

    Returns the reduced vectors and the transform as coefficient columns:
    reduced[j] = sum_t U[j][t] * vectors[t].
    """
    n = len(vectors)
    b = [list(v) for v in vectors]
    U = [[int(i == j) for i in range(n)] for j in range(n)]
    gso = gso_compute(b)
    mu = [list(row) for row in gso.mu]
    B = list(gso.norms_sq)
    slack = 1 + Fraction(eps)

    def red(k: int, l: int) -> None:
        q = round(mu[k][l])
        if q:
            b[k] = [x - q * y for x, y in zip(b[k], b[l])]
            U[k] = [x - q * y for x, y in zip(U[k], U[l])]
            mu[k][l] -= q
            for i in range(l):
                mu[k][i] -= q * mu[l][i]

    def swap(k: int) -> None:
        b[k], b[k - 1] = b[k - 1], b[k]
        U[k], U[k - 1] = U[k - 1], U[k]
        for j in range(k - 1):
            mu[k][j], mu[k - 1][j] = mu[k - 1][j], mu[k][j]
        m = mu[k][k - 1]
        new_prev = B[k] + m * m * B[k - 1]
        mu[k][k - 1] = m * B[k - 1] / new_prev
        B[k] = B[k - 1] * B[k] / new_prev
        B[k - 1] = new_prev
        for i in range(k + 1, n):
            t = mu[i][k]
            mu[i][k] = mu[i][k - 1] - m * t
            mu[i][k - 1] = t + mu[k][k - 1] * mu[i][k]

    k = 1
    while k < n:
        red(k, k - 1)
        if B[k - 1] > slack * (B[k] + mu[k][k - 1] ** 2 * B[k - 1]):
            swap(k)
            k = max(k - 1, 1)
        else:
            for l in range(k - 2, -1, -1):
                red(k, l)
            k += 1
    return b, U


def lll_reduce(B: Basis, eps: Scalar = BLOCK_LLL_EPS, with_transform: bool = False
               ) -> Union[Basis, Tuple[Basis, List[List[int]]]]:
    """eps-LLL reduction: size-reduced and
    ||b*_{i-1}||^2 <= (1+eps) ||mu_{i,i-1} b*_{i-1} + b*_i||^2 for 1 < i <= n.

    With ``with_transform`` the coefficient columns of the unimodular
    transform are returned as well.
    """
    if not 0 <= eps <= 1:
        raise ParameterDomainError(f"LLL eps must lie in [0,1], got {eps}")
    reduced, U = _lll_vectors(B.columns, Fraction(eps))
    out = Basis(tuple(tuple(col) for col in reduced))
    return (out, U) if with_transform else out


def lll_reduce_block(B: Basis, r: BlockRange, eps: Scalar = BLOCK_LLL_EPS) -> Basis:
    """LLL-reduce the projected block B_[r] and size-reduce the result"""
    r.check(B.n)
    _, U = _lll_vectors(projected_block(B, r), Fraction(eps))
    if any(U[j][t] != int(j == t) for j in range(r.rank()) for t in range(r.rank())):
        B = B.transform(r, U)
    return size_reduce(B, start=r.lo)


# ---------------------------------------------------------------------------
# Enumeration
# ---------------------------------------------------------------------------

def _zigzag(center: Fraction, nonnegative: bool) -> Iterator[int]:
    """Integers by non-decreasing distance to center"""
    if nonnegative:
        x = 0
        while True:
            yield x
            x += 1
    x0 = round(center)
    yield x0
    up, down = x0 + 1, x0 - 1
    while True:
        if abs(up - center) <= abs(down - center):
            yield up
            up += 1
        else:
            yield down
            down -= 1


def _shortest_coefficients(mu: Sequence[Sequence[Fraction]],
                           norms: Sequence[Fraction]) -> Tuple[Fraction, List[Tuple[int, ...]]]:
    """All minimal coefficient vectors (one per +/- pair) and the minimum"""
    n = len(norms)
    radius = [norms[0]]
    found: List[Tuple[int, ...]] = []
    x = [0] * n

    def search(i: int, partial: Fraction, top_zero: bool) -> None:
        center = -sum((x[j] * mu[j][i] for j in range(i + 1, n)), Fraction(0))
        for xi in _zigzag(center, top_zero):
            p = partial + (xi - center) ** 2 * norms[i]
            if p > radius[0]:
                break
            x[i] = xi
            if i == 0:
                if top_zero and xi == 0:
                    continue
                if p < radius[0]:
                    radius[0] = p
                    found.clear()
                found.append(tuple(x))
            else:
                search(i - 1, p, top_zero and xi == 0)
        x[i] = 0

    search(n - 1, Fraction(0), True)
    return radius[0], found


def _canonical(coeffs: Sequence[int]) -> Tuple[int, ...]:
    for c in coeffs:
        if c:
            return tuple(coeffs) if c > 0 else tuple(-v for v in coeffs)
    return tuple(coeffs)


def enumerate_shortest(B: Union[Basis, Sequence[Sequence[Scalar]]],
                       budget: Optional[OracleBudget] = None) -> ShortestVectorResult:
    """Exact shortest nonzero vector of L(B).

    Ties are broken by the lexicographically smallest coefficient vector
    whose first nonzero entry is positive.
    """
    vectors = B.columns if isinstance(B, Basis) else B
    budget = budget if budget is not None else OracleBudget()
    budget.charge(len(vectors))

    reduced, U = _lll_vectors(vectors, PREPROCESS_EPS)
    gso = gso_compute(reduced)
    best, candidates = _shortest_coefficients(gso.mu, gso.norms_sq)

    n = len(vectors)
    mapped = []
    for c in candidates:
        coeffs = [sum(c[j] * U[j][t] for j in range(n)) for t in range(n)]
        mapped.append(_canonical(coeffs))
    coeffs = min(mapped)
    logger.debug("Oracle call #%d: rank %d, lambda1^2 = %s (%d minimal pairs)",
                 budget.call_counter, n, best, len(mapped))
    return ShortestVectorResult(coeffs, Fraction(best), combine(coeffs, vectors))


def lambda1(B: Union[Basis, Sequence[Sequence[Scalar]]],
            budget: Optional[OracleBudget] = None) -> Fraction:
    """lambda_1(L(B))^2"""
    return enumerate_shortest(B, budget).norm_sq


# ---------------------------------------------------------------------------
# Insertion
# ---------------------------------------------------------------------------

def extended_gcd(a: int, b: int) -> Tuple[int, int, int]:
    """Return (g, p, q) with p*a + q*b = g = gcd(a, b) >= 0"""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        quotient = old_r // r
        old_r, r = r, old_r - quotient * r
        old_s, s = s, old_s - quotient * s
        old_t, t = t, old_t - quotient * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def primal_insertion(x: Sequence[int]) -> List[List[int]]:
    """Unimodular block transform whose first column is the primitive vector x.

    With l the last nonzero index of x, columns 2..l+1 lift a lower-triangular
    Hermite basis of the projection of L(b_1..b_l) orthogonal to v = Bx,
    taken relative to the projections of b_1..b_{l-1}. Its diagonal divides
    x_l, so no Gram-Schmidt norm grows. Columns after l are kept.
    """
    s = len(x)
    l = max(j for j in range(s) if x[j])
    K = eye(l + 1)
    if l:
        # [x_l*I | -x'] over rows 0..l-1; K tracks the same column operations
        H = Matrix.hstack(x[l] * eye(l), -Matrix(x[:l]))
        for i in range(l):
            a, b = int(H[i, i]), int(H[i, l])
            if b == 0:
                continue
            g, p, q = extended_gcd(a, b)
            D = Matrix([[p, -b // g],
                        [q, a // g]])
            for M in (H, K):
                X = Matrix.hstack(M.col(i), M.col(l)) * D
                M[:, i] = X.col(0)
                M[:, l] = X.col(1)
    pad = [0] * (s - l - 1)
    columns = [list(x)]
    columns += [[int(v) for v in K.col(i)] + pad for i in range(l)]
    columns += [[int(t == j) for t in range(s)] for j in range(l + 1, s)]
    if abs(Matrix(columns).det()) != 1:
        raise ParameterDomainError(f"Coefficient vector {tuple(x)} is not primitive")
    return columns


def dual_insertion(y: Sequence[int]) -> List[List[int]]:
    """Unimodular block transform U with y^T U = e_s^T for a primitive y.

    Pairwise extended-gcd steps push the functional onto the last column.
    """
    s = len(y)
    y = list(y)
    U = [[int(t == j) for t in range(s)] for j in range(s)]
    for j in range(s - 1):
        a, b = y[j], y[j + 1]
        if a == 0:
            continue
        g, p, q = extended_gcd(a, b)
        aj, bj = a // g, b // g
        U[j], U[j + 1] = ([bj * u - aj * v for u, v in zip(U[j], U[j + 1])],
                          [p * u + q * v for u, v in zip(U[j], U[j + 1])])
        y[j], y[j + 1] = 0, g
    if y[-1] != 1:
        raise ParameterDomainError(f"Dual functional {y} is not primitive")
    return U


# ---------------------------------------------------------------------------
# Block reduction steps
# ---------------------------------------------------------------------------

def svp_reduce_block(B: Basis, r: BlockRange, delta: Scalar = 1,
                     budget: Optional[OracleBudget] = None) -> Basis:
    """Make the first vector of B_[r] a shortest vector of the projected block.

    The shortest vector is inserted only if it is strictly shorter than the
    current first vector. The block is then 1/3-LLL-reduced and the basis
    size-reduced; columns before the block are untouched and no GSO norm grows.
    """
    _check_delta(delta)
    r.check(B.n)
    gso = gso_compute(B)
    block = projected_block(B, r, gso)
    res = enumerate_shortest(block, budget)
    if res.norm_sq < gso.norms_sq[r.lo - 1]:
        logger.debug("SVP-reduce %s: %s -> %s", r, gso.norms_sq[r.lo - 1], res.norm_sq)
        B = B.transform(r, primal_insertion(res.coeffs))
    return lll_reduce_block(B, r)


def dsvp_reduce_block(B: Basis, r: BlockRange, delta: Scalar = 1,
                      budget: Optional[OracleBudget] = None) -> Basis:
    """Make the reversed dual of B_[r] SVP-reduced, i.e. ||b*_hi|| maximal,
    then 1/3-LLL-reduce the block (which keeps ||b*_hi||).
    """
    _check_delta(delta)
    r.check(B.n)
    gso = gso_compute(B)
    block = projected_block(B, r, gso)
    dual = rational_reversed_dual(block)
    res = enumerate_shortest(dual, budget)
    current = 1 / gso.norms_sq[r.hi - 1]
    if res.norm_sq < current:
        y = [dot(res.vector, p) for p in block]
        if any(Fraction(v).denominator != 1 for v in y):
            raise ParameterDomainError("Dual vector is not integral on the block")
        logger.debug("DSVP-reduce %s: ||b*_hi||^2 %s -> %s", r, gso.norms_sq[r.hi - 1], 1 / res.norm_sq)
        B = B.transform(r, dual_insertion([int(v) for v in y]))
    return lll_reduce_block(B, r)
